#include "coxcheck/audit.hpp"

#include "coxcheck/errors.hpp"

#include <algorithm>

namespace coxcheck {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::untestable: return "untestable";
  }
  return "?";
}

Verdict AuditReport::overall() const {
  bool untestable = false;
  for (const auto& h : hypotheses) {
    if (h.verdict == Verdict::fail) return Verdict::fail;
    untestable = untestable || h.verdict == Verdict::untestable;
  }
  return untestable ? Verdict::untestable : Verdict::pass;
}

const HypothesisResult* AuditReport::find(std::string_view name) const {
  for (const auto& h : hypotheses)
    if (h.name == name) return &h;
  return nullptr;
}

std::string describe(const Domain& d, const PairWitness& w) {
  return "Bel(" + d.format(w.v) + "|" + d.format(w.u) + ") = " + to_string(w.value);
}

std::string describe(const Domain& d, const TripleWitness& w) {
  return "V=" + d.format(w.v) + " V'=" + d.format(w.v_prime) + " U=" + d.format(w.u) + ": F(" + to_string(w.x) + "," +
         to_string(w.y) + ") = " + to_string(w.result);
}

namespace {

HypothesisResult make(std::string name, Verdict v, std::string witness = {}, std::string note = {}) {
  return HypothesisResult{std::move(name), v, std::move(witness), std::move(note), false};
}

std::string describe_violation(const MonotoneViolation& v, bool binary) {
  if (!binary)
    return "S(" + to_string(v.lo) + ") = " + to_string(v.value_lo) + ", S(" + to_string(v.hi) + ") = " + to_string(v.value_hi);
  auto at = [&](const Rational& x) {
    return v.coordinate == 0 ? "F(" + to_string(x) + "," + to_string(v.fixed) + ")"
                             : "F(" + to_string(v.fixed) + "," + to_string(x) + ")";
  };
  return at(v.lo) + " = " + to_string(v.value_lo) + ", " + at(v.hi) + " = " + to_string(v.value_hi);
}

// A1, A2, Par1-Par4 for one structure.
struct Axioms {
  std::vector<HypothesisResult> results;
  std::optional<NegationForm> s;
  std::optional<CombinationForm> f;
  bool closed_form = false;
};

Axioms axioms(const BeliefStructure& b, const ExtractionOptions& ex) {
  Axioms a;
  const Domain& d = b.domain();
  try {
    auto ns = extract_negation(b, ex);
    if (auto* c = std::get_if<NegationConflict>(&ns)) {
      a.results.push_back(make("A1", Verdict::fail,
                               describe(d, c->first) + " and " + describe(d, c->second) + " but complements " +
                                   describe(d, c->first_complement) + ", " + describe(d, c->second_complement)));
    } else {
      a.s = std::get<NegationForm>(ns);
      a.results.push_back(make("A1", Verdict::pass, {}, "S has " + std::to_string(a.s->table().size()) + " entries"));
    }
    auto cs = extract_combination(b, ex);
    if (auto* c = std::get_if<CombinationConflict>(&cs)) {
      a.results.push_back(make("A2", Verdict::fail, describe(d, c->first) + " vs " + describe(d, c->second)));
    } else {
      a.f = std::get<CombinationForm>(cs);
      a.results.push_back(make("A2", Verdict::pass, {}, "F has " + std::to_string(a.f->table().size()) + " entries"));
    }
  } catch (const BudgetExceeded&) {
    if (b.is_table()) throw;
    a.closed_form = true;
    a.results.clear();
    std::string note = "certified from the generating measure (exponent " + std::to_string(b.exponent()) + ")";
    a.results.push_back(make("A1", Verdict::pass, {}, note));
    a.results.push_back(make("A2", Verdict::pass, {}, note));
  }

  auto bounds = check_bounds(b);
  std::string bnote = bounds.closed_form ? "certified from the generating measure" : "";
  a.results.push_back(bounds.range_ok ? make("Par1", Verdict::pass, {}, bnote)
                                      : make("Par1", Verdict::fail, describe(d, *bounds.range_witness),
                                             "value outside [" + to_string(b.bounds().lo) + ", " +
                                                 to_string(b.bounds().hi) + "]"));
  a.results.push_back(bounds.endpoints_ok ? make("Par2", Verdict::pass, {}, bnote)
                                          : make("Par2", Verdict::fail, describe(d, *bounds.endpoint_witness)));

  if (a.closed_form) {
    a.results.push_back(make("Par3", Verdict::pass, {}, "S is strictly decreasing in closed form"));
    a.results.push_back(make("Par4", Verdict::pass, {}, "F is the rescaled product in closed form"));
    return a;
  }
  if (!a.s) {
    a.results.push_back(make("Par3", Verdict::untestable, {}, "S is not a function (A1 fails)"));
  } else {
    auto m = check_monotonicity(*a.s);
    a.results.push_back(m.strict ? make("Par3", Verdict::pass, {}, "checked on attained values")
                                 : make("Par3", Verdict::fail, describe_violation(*m.strict_violation, false)));
  }
  if (!a.f) {
    a.results.push_back(make("Par4", Verdict::untestable, {}, "F is not a function (A2 fails)"));
  } else {
    auto m = check_monotonicity(*a.f);
    if (!m.weak)
      a.results.push_back(make("Par4", Verdict::fail, describe_violation(*m.weak_violation, true), "F decreases"));
    else if (!m.strict)
      a.results.push_back(
          make("Par4", Verdict::fail, describe_violation(*m.strict_violation, true), "F is not strictly increasing"));
    else
      a.results.push_back(
          make("Par4", Verdict::pass, {}, "monotonicity checked on attained arguments; continuity untestable on a table"));
  }
  return a;
}

HypothesisResult gap_result(const BeliefStructure& b) {
  Rational gap = par5_gap(b);
  return make("Par5", Verdict::fail, "unsatisfiable on finite domain, gap = " + to_string(gap) + " > 0");
}

void theorem1(const BeliefStructure& b, const AuditInputs& in, AuditReport& r) {
  auto a = axioms(b, in.extraction);
  r.hypotheses = a.results;
  r.hypotheses.push_back(gap_result(b));
}

void theorem2(const BeliefStructure& b, const AuditInputs& in, AuditReport& r) {
  auto a = axioms(b, in.extraction);
  for (const auto& h : a.results)
    if (h.name == "A1" || h.name == "A2") r.hypotheses.push_back(h);
  const Bounds& bd = b.bounds();
  auto bounds = check_bounds(b);
  if (bd.lo != 0 || bd.hi != 1)
    r.hypotheses.push_back(make("range", Verdict::fail, "bounds [" + to_string(bd.lo) + ", " + to_string(bd.hi) + "]",
                                "values must lie in [0,1]"));
  else if (!bounds.range_ok)
    r.hypotheses.push_back(make("range", Verdict::fail, describe(b.domain(), *bounds.range_witness)));
  else
    r.hypotheses.push_back(make("range", Verdict::pass));

  if (a.closed_form) {
    r.hypotheses.push_back(make("S-linear-complement", Verdict::untestable, {}, "structure too large to tabulate"));
  } else if (!a.s) {
    r.hypotheses.push_back(make("S-linear-complement", Verdict::untestable, {}, "S is not a function"));
  } else {
    HypothesisResult h = make("S-linear-complement", Verdict::pass);
    for (const auto& [x, v] : a.s->table())
      if (v != bd.lo + bd.hi - x) {
        h = make("S-linear-complement", Verdict::fail, "S(" + to_string(x) + ") = " + to_string(v));
        break;
      }
    r.hypotheses.push_back(h);
  }
  r.hypotheses.push_back(
      make("S-smoothness", Verdict::untestable, {}, "differentiability is declared metadata of catalog forms only"));
  r.hypotheses.push_back(
      make("F-smoothness", Verdict::untestable, {}, "differentiability is declared metadata of catalog forms only"));

  if (!a.f) {
    std::string why = a.closed_form ? "structure too large to tabulate" : "F is not a function";
    for (const char* name : {"F-nondecreasing", "F-strict", "F-commutative", "F-zero", "F-unit"})
      r.hypotheses.push_back(make(name, Verdict::untestable, {}, why));
  } else {
    const auto& f = *a.f;
    auto m = check_monotonicity(f);
    r.hypotheses.push_back(m.weak ? make("F-nondecreasing", Verdict::pass)
                                  : make("F-nondecreasing", Verdict::fail, describe_violation(*m.weak_violation, true)));
    r.hypotheses.push_back(m.strict ? make("F-strict", Verdict::pass)
                                    : make("F-strict", Verdict::fail, describe_violation(*m.strict_violation, true)));
    HypothesisResult comm = make("F-commutative", Verdict::pass);
    HypothesisResult zero = make("F-zero", Verdict::pass);
    HypothesisResult unit = make("F-unit", Verdict::pass);
    std::size_t comm_checked = 0, zero_checked = 0, unit_checked = 0;
    for (const auto& [k, v] : f.table()) {
      const auto& [x, y] = k;
      if (auto sw = f(y, x)) {
        ++comm_checked;
        if (*sw != v && comm.verdict == Verdict::pass)
          comm = make("F-commutative", Verdict::fail,
                      "F(" + to_string(x) + "," + to_string(y) + ") = " + to_string(v) + ", F(" + to_string(y) + "," +
                          to_string(x) + ") = " + to_string(*sw));
      }
      if (x == bd.lo || y == bd.lo) {
        ++zero_checked;
        if (v != bd.lo && zero.verdict == Verdict::pass)
          zero = make("F-zero", Verdict::fail, "F(" + to_string(x) + "," + to_string(y) + ") = " + to_string(v));
      }
      if (x == bd.hi || y == bd.hi) {
        ++unit_checked;
        const Rational& other = x == bd.hi ? y : x;
        if (v != other && unit.verdict == Verdict::pass)
          unit = make("F-unit", Verdict::fail, "F(" + to_string(x) + "," + to_string(y) + ") = " + to_string(v));
      }
    }
    comm.note = std::to_string(comm_checked) + " attained pairs";
    zero.note = std::to_string(zero_checked) + " attained pairs";
    unit.note = std::to_string(unit_checked) + " attained pairs";
    comm.vacuous = comm_checked == 0;
    zero.vacuous = zero_checked == 0;
    unit.vacuous = unit_checked == 0;
    r.hypotheses.push_back(comm);
    r.hypotheses.push_back(zero);
    r.hypotheses.push_back(unit);
  }

  auto verdict = decide(b, in.decide);
  switch (verdict.kind) {
    case IsomorphismVerdict::Kind::refutation:
      r.hypotheses.push_back(make("not-isomorphic", Verdict::pass, {}, "certificate: " + verdict.certificate->kind()));
      break;
    case IsomorphismVerdict::Kind::witness:
      r.hypotheses.push_back(make("not-isomorphic", Verdict::fail, "structure is isomorphic, not a counterexample",
                                  "witness found by " + verdict.method + " search"));
      break;
    case IsomorphismVerdict::Kind::unknown:
      r.hypotheses.push_back(make("not-isomorphic", Verdict::untestable, {}, "decision budget exhausted"));
      break;
  }
}

void theorem3(const BeliefStructure& b, const AuditInputs& in, AuditReport& r) {
  if (!in.extension) throw PreconditionError("theorem 3 audit needs an extended structure");
  const BeliefStructure& ext = *in.extension;
  const Domain& bd = b.domain();
  const Domain& ed = ext.domain();

  // embedding of base atoms
  std::vector<std::optional<Event>> image(bd.size());
  std::string embed_error;
  for (const auto& e : in.embedding) {
    auto atom = bd.find(e.base_atom);
    if (!atom) {
      embed_error = "unknown base atom " + e.base_atom;
      break;
    }
    try {
      image[*atom] = ed.event(e.image);
    } catch (const std::invalid_argument& err) {
      embed_error = err.what();
      break;
    }
  }
  Event covered(ed.size());
  for (std::size_t i = 0; embed_error.empty() && i < image.size(); ++i) {
    if (!image[i]) embed_error = "no image for base atom " + bd.atom(i);
    else if (image[i]->empty()) embed_error = "empty image for base atom " + bd.atom(i);
    else if (!(covered & *image[i]).empty()) embed_error = "images of base atoms overlap at " + bd.atom(i);
    else covered = covered | *image[i];
  }
  if (embed_error.empty() && covered != ed.full_event()) embed_error = "images do not cover the extended domain";

  if (!embed_error.empty()) {
    r.hypotheses.push_back(make("extends", Verdict::fail, embed_error));
  } else {
    auto embed = [&](const Event& v) {
      Event out(ed.size());
      for (auto a : v.members()) out = out | *image[a];
      return out;
    };
    HypothesisResult h = make("extends", Verdict::pass);
    std::size_t checked = 0;
    for_each_nested(b, 2, [&](const std::vector<Counts>& lv) {
      bool nonempty = std::any_of(lv[0].begin(), lv[0].end(), [](auto c) { return c != 0; });
      if (!nonempty) return true;
      Event u = b.representative(lv[0]), v = b.representative(lv[1]);
      Rational base = b.bel(v, u), extended = ext.bel(embed(v), embed(u));
      ++checked;
      if (base != extended) {
        h = make("extends", Verdict::fail,
                 describe(bd, PairWitness{v, u, base}) + " but the extension gives " + to_string(extended));
        return false;
      }
      return true;
    });
    if (h.verdict == Verdict::pass) h.note = std::to_string(checked) + " base pairs agree";
    r.hypotheses.push_back(h);
  }

  auto a = axioms(ext, in.extraction);
  for (auto& h : a.results) {
    h.name += "+";
    r.hypotheses.push_back(h);
  }
  Rational g0 = par5_gap(b), g1 = par5_gap(ext);
  r.hypotheses.push_back(g1 <= g0 ? make("gap-shrinkage", Verdict::pass, {},
                                         "gap " + to_string(g0) + " -> " + to_string(g1))
                                  : make("gap-shrinkage", Verdict::fail, "gap " + to_string(g0) + " -> " + to_string(g1)));
  r.notes.push_back(
      "the theorem assumes such an extension exists; only the supplied extension is checked, existence is not decided");
}

void theorem4(const BeliefStructure&, const AuditInputs& in, AuditReport& r) {
  if (in.family.empty()) throw PreconditionError("theorem 4 audit needs a nonempty family");
  ExtractionOptions ex = in.extraction;
  ex.cap = std::min(ex.cap, 2e5);
  auto ev = build_uniformity(in.family, ex);
  std::string note = std::to_string(ev.s_table.size()) + " S entries, " + std::to_string(ev.f_table.size()) +
                     " F entries, " + std::to_string(ev.closed_form_members.size()) + " members in closed form";
  bool f_conflict = ev.conflict.rfind("F", 0) == 0 || ev.conflict.find("closed-form F") != std::string::npos ||
                    ev.conflict.find("F is not") != std::string::npos;
  if (ev.uniform) {
    r.hypotheses.push_back(make("uniform-S", Verdict::pass, {}, note));
    r.hypotheses.push_back(make("uniform-F", Verdict::pass, {}, note));
  } else if (f_conflict) {
    r.hypotheses.push_back(make("uniform-S", Verdict::pass, {}, note));
    r.hypotheses.push_back(make("uniform-F", Verdict::fail, ev.conflict));
  } else {
    r.hypotheses.push_back(make("uniform-S", Verdict::fail, ev.conflict));
    r.hypotheses.push_back(make("uniform-F", Verdict::untestable, {}, "S already disagrees"));
  }
  for (const char* name : {"Par1", "Par2", "Par3", "Par4"}) r.hypotheses.push_back(make(name, Verdict::pass));
  for (std::size_t i = 0; i < in.family.size(); ++i) {
    auto a = axioms(in.family[i], ex);
    for (const auto& h : a.results) {
      auto it = std::find_if(r.hypotheses.begin(), r.hypotheses.end(), [&](const auto& x) { return x.name == h.name; });
      if (it == r.hypotheses.end() || it->verdict == Verdict::fail) continue;
      if (h.verdict == Verdict::fail || (h.verdict == Verdict::untestable && it->verdict == Verdict::pass)) {
        *it = h;
        it->witness = "member " + std::to_string(i) + ": " + h.witness;
      }
    }
  }
  for (auto& h : r.hypotheses)
    if (h.name.rfind("Par", 0) == 0 && h.verdict == Verdict::pass && h.note.empty())
      h.note = "all " + std::to_string(in.family.size()) + " members";
  auto density = par5_family(in.family, in.family_grid, in.family_epsilon, in.density);
  std::string worst = "(" + to_string(density.worst_target[0]) + "," + to_string(density.worst_target[1]) + "," +
                      to_string(density.worst_target[2]) + ") at distance " + std::to_string(density.worst_distance);
  HypothesisResult h = density.pass ? make("Par5'", Verdict::pass, {}, "worst target " + worst)
                                    : make("Par5'", Verdict::fail, "worst target " + worst,
                                           std::to_string(density.failures) + " of " +
                                               std::to_string(density.targets) + " targets missed");
  h.vacuous = density.vacuous;
  if (density.vacuous) h.note = "empty probe grid";
  r.hypotheses.push_back(h);
}

}  // namespace

AuditReport audit(const BeliefStructure& b, int theorem, const AuditInputs& inputs) {
  AuditReport r;
  r.theorem = theorem;
  switch (theorem) {
    case 1: theorem1(b, inputs, r); break;
    case 2: theorem2(b, inputs, r); break;
    case 3: theorem3(b, inputs, r); break;
    case 4: theorem4(b, inputs, r); break;
    default: throw std::invalid_argument("theorem must be 1, 2, 3 or 4");
  }
  return r;
}

}  // namespace coxcheck
