#include "coxcheck/report.hpp"

#include <sstream>

namespace coxcheck {

Json to_json(const Rational& q) { return to_string(q); }

Json to_json(const Domain& d, const PairWitness& w) {
  return Json{{"v", d.format(w.v)}, {"u", d.format(w.u)}, {"value", to_json(w.value)}};
}

Json to_json(const Domain& d, const TripleWitness& w) {
  return Json{{"v", d.format(w.v)},   {"v_prime", d.format(w.v_prime)}, {"u", d.format(w.u)},
              {"x", to_json(w.x)},     {"y", to_json(w.y)},                {"result", to_json(w.result)}};
}

Json to_json(const Domain& d, const ChainQuadruple& c) {
  return Json{{"u1", d.format(c.u1)}, {"u2", d.format(c.u2)}, {"u3", d.format(c.u3)}, {"u4", d.format(c.u4)},
              {"x", to_json(c.x)},    {"y", to_json(c.y)},    {"z", to_json(c.z)}};
}

namespace {

Json link_json(const Domain& d, const OrderLink& l) {
  Json j{{"lo", d.format(l.lo)},
         {"hi", d.format(l.hi)},
         {"strict", l.strict},
         {"source", l.source == OrderLink::Source::context ? "context" : "inclusion"}};
  if (l.source == OrderLink::Source::context) {
    j["context"] = d.format(l.context);
    j["from_lo"] = d.format(l.from_lo);
    j["from_hi"] = d.format(l.from_hi);
    j["normalized"] = l.normalized;
  }
  return j;
}

}  // namespace

Json to_json(const Domain& d, const RefutationCertificate& c) {
  Json j{{"type", c.kind()}};
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NegationConflict>) {
          j["first"] = to_json(d, x.first);
          j["first_complement"] = to_json(d, x.first_complement);
          j["second"] = to_json(d, x.second);
          j["second_complement"] = to_json(d, x.second_complement);
        } else if constexpr (std::is_same_v<T, CombinationConflict>) {
          j["first"] = to_json(d, x.first);
          j["second"] = to_json(d, x.second);
        } else if constexpr (std::is_same_v<T, ChainCertificate>) {
          j["x"] = to_json(x.x);
          j["y"] = to_json(x.y);
          j["z"] = to_json(x.z);
          j["yz"] = to_json(d, x.yz);
          j["x_yz"] = to_json(d, x.x_yz);
          j["xy"] = to_json(d, x.xy);
          j["xy_z"] = to_json(d, x.xy_z);
        } else {
          Json cycle = Json::array();
          for (const auto& l : x.cycle) cycle.push_back(link_json(d, l));
          j["cycle"] = cycle;
        }
      },
      c.data);
  return j;
}

Json residual_json(const ResidualReport& r) {
  Json w = Json::array();
  for (const auto& x : r.witness) w.push_back(to_json(x));
  return Json{{"equation", std::string(equation_name(r.equation))},
              {"grid", r.grid},
              {"residual", to_json(r.residual)},
              {"witness", w},
              {"coverage", r.coverage()},
              {"evaluated", r.evaluated},
              {"total", r.total},
              {"zero_denominator", r.zero_denominator},
              {"undefined", r.undefined},
              {"partial", r.partial}};
}

Json verdict_json(const Domain& d, const IsomorphismVerdict& v, const DecideOptions& options) {
  Json j{{"kind", std::string(verdict_name(v.kind))}};
  if (v.witness) {
    Json weights = Json::object();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (v.witness->exact)
        weights[d.atom(i)] = to_json((*v.witness->exact)[i]);
      else
        weights[d.atom(i)] = static_cast<double>(v.witness->numeric[i]);
    }
    j["weights"] = weights;
    j["exact"] = v.witness->exact.has_value();
    j["method"] = v.method;
  }
  if (v.rescaling) {
    Json graph = Json::array();
    if (!v.rescaling->graph.empty())
      for (const auto& [x, g] : v.rescaling->graph) graph.push_back(Json::array({to_json(x), to_json(g)}));
    else
      for (const auto& [x, g] : v.rescaling->numeric_graph)
        graph.push_back(Json::array({static_cast<double>(x), static_cast<double>(g)}));
    j["g-graph"] = graph;
  }
  if (v.certificate) j["certificate"] = to_json(d, *v.certificate);
  Json budget{{"restarts", options.restarts},
              {"iterations", options.budget},
              {"tolerance", static_cast<double>(options.tolerance)},
              {"seed", options.seed}};
  if (v.unknown) {
    budget["restarts_used"] = v.unknown->restarts;
    budget["iterations_used"] = v.unknown->iterations;
    budget["best_violation"] = static_cast<double>(v.unknown->best_violation);
    j["reason"] = v.unknown->reason;
  }
  j["budget"] = budget;
  if (!v.skipped.empty()) j["skipped"] = v.skipped;
  return j;
}

Json audit_json(const AuditReport& r) {
  Json hyps = Json::array();
  for (const auto& h : r.hypotheses) {
    Json e{{"name", h.name}, {"verdict", std::string(verdict_name(h.verdict))}, {"witness", h.witness}};
    if (!h.note.empty()) e["note"] = h.note;
    if (h.vacuous) e["vacuous"] = true;
    hyps.push_back(e);
  }
  Json j{{"theorem", r.theorem}, {"hypotheses", hyps}, {"verdict", std::string(verdict_name(r.overall()))}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

Json bounds_json(const Domain& d, const BoundsReport& r) {
  Json j{{"range", r.range_ok}, {"endpoints", r.endpoints_ok}, {"pairs_checked", r.pairs_checked},
         {"closed_form", r.closed_form}};
  if (r.range_witness) j["range_witness"] = to_json(d, *r.range_witness);
  if (r.endpoint_witness) j["endpoint_witness"] = to_json(d, *r.endpoint_witness);
  return j;
}

Json chain_json(const Domain& d, const ChainConsistencyReport& r) {
  static const char* outcomes[] = {"pass", "certificate", "extraction-conflict"};
  Json j{{"outcome", outcomes[static_cast<int>(r.outcome)]},
         {"instances", r.instances},
         {"interior_instances", r.interior_instances},
         {"vacuous", r.vacuous},
         {"closed_form", r.closed_form}};
  if (r.certificate) j["certificate"] = to_json(d, RefutationCertificate{*r.certificate});
  if (r.conflict) j["conflict"] = to_json(d, RefutationCertificate{*r.conflict});
  return j;
}

Json negation_identity_json(const NegationIdentityReport& r) {
  Json j{{"pass", r.pass}, {"checked", r.checked}, {"untestable", r.untestable.size()}};
  if (r.failing_y) {
    j["y"] = to_json(*r.failing_y);
    j["s_y"] = to_json(r.s_y);
    j["s_s_y"] = to_json(r.s_s_y);
  }
  return j;
}

Json search_json(const Domain* d, const CounterexampleSearch& s) {
  Json j{{"outcome", s.hit ? "hit" : "exhausted"},
         {"candidates", s.candidates},
         {"isomorphic", s.isomorphic},
         {"unknown", s.unknown},
         {"symmetric_skipped", s.symmetric_skipped}};
  if (d && s.certificate) j["certificate"] = to_json(*d, *s.certificate);
  return j;
}

std::string residual_text(const ResidualReport& r) {
  std::ostringstream out;
  out << "equation " << equation_name(r.equation) << " grid " << r.grid << "\n";
  out << "residual " << to_string(r.residual) << "\n";
  out << "evaluated " << r.evaluated << "/" << r.total << " (zero denominator " << r.zero_denominator
      << ", undefined " << r.undefined << ")\n";
  if (!r.witness.empty()) {
    out << "witness";
    for (const auto& x : r.witness) out << " " << to_string(x);
    out << "\n";
  }
  return out.str();
}

namespace {

std::string pair_text(const Domain& d, const PairWitness& w) {
  return "Bel(" + d.format(w.v) + "|" + d.format(w.u) + ") = " + to_string(w.value);
}

}  // namespace

std::string certificate_text(const Domain& d, const RefutationCertificate& c) {
  std::ostringstream out;
  out << "certificate " << c.kind() << "\n";
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NegationConflict>) {
          out << "  " << pair_text(d, x.first) << ", " << pair_text(d, x.first_complement) << "\n";
          out << "  " << pair_text(d, x.second) << ", " << pair_text(d, x.second_complement) << "\n";
        } else if constexpr (std::is_same_v<T, CombinationConflict>) {
          out << "  " << describe(d, x.first) << "\n  " << describe(d, x.second) << "\n";
        } else if constexpr (std::is_same_v<T, ChainCertificate>) {
          out << "  x=" << to_string(x.x) << " y=" << to_string(x.y) << " z=" << to_string(x.z) << "\n";
          for (const auto* w : {&x.yz, &x.x_yz, &x.xy, &x.xy_z}) out << "  " << describe(d, *w) << "\n";
        } else {
          for (const auto& l : x.cycle) {
            out << "  mu" << d.format(l.lo) << (l.strict ? " < " : " <= ") << "mu" << d.format(l.hi);
            if (l.source == OrderLink::Source::inclusion)
              out << "  (inclusion)";
            else
              out << "  (Bel(" << d.format(l.from_lo) << "|" << d.format(l.context) << ") vs Bel("
                  << d.format(l.from_hi) << "|" << d.format(l.context) << ")" << (l.normalized ? ", overlap removed" : "")
                  << ")";
            out << "\n";
          }
        }
      },
      c.data);
  return out.str();
}

std::string verdict_text(const Domain& d, const IsomorphismVerdict& v) {
  std::ostringstream out;
  out << "verdict " << verdict_name(v.kind) << "\n";
  if (v.witness) {
    out << "weights (" << v.method << ")";
    for (std::size_t i = 0; i < d.size(); ++i) {
      out << " " << d.atom(i) << "=";
      if (v.witness->exact)
        out << to_string((*v.witness->exact)[i]);
      else
        out << static_cast<double>(v.witness->numeric[i]);
    }
    out << "\n";
  }
  if (v.rescaling && !v.rescaling->graph.empty()) {
    out << "g";
    for (const auto& [x, g] : v.rescaling->graph) out << " " << to_string(x) << "->" << to_string(g);
    out << "\n";
  }
  if (v.certificate) out << certificate_text(d, *v.certificate);
  if (v.unknown) out << "unknown: " << v.unknown->reason << "\n";
  for (const auto& s : v.skipped) out << "skipped " << s << "\n";
  return out.str();
}

std::string audit_text(const AuditReport& r) {
  std::ostringstream out;
  out << "theorem " << r.theorem << "\n";
  for (const auto& h : r.hypotheses) {
    out << "  " << h.name << ": " << verdict_name(h.verdict);
    if (!h.witness.empty()) out << "  [" << h.witness << "]";
    if (!h.note.empty()) out << "  " << h.note;
    if (h.vacuous) out << "  (vacuous)";
    out << "\n";
  }
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  out << "verdict " << verdict_name(r.overall()) << "\n";
  return out.str();
}

}  // namespace coxcheck
