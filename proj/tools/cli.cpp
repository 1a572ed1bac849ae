#include "cli.hpp"

#include "coxcheck/audit.hpp"
#include "coxcheck/errors.hpp"
#include "coxcheck/generators.hpp"
#include "coxcheck/report.hpp"
#include "coxcheck/structure_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace coxcheck::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Check {
  std::string name;
  Verdict verdict;
  std::string detail;
  double ms = 0;
};

struct Outcome {
  int code = kPass;
  std::string verdict;
  std::vector<Check> checks;
  Json payload = Json::object();
};

int code_of(const std::vector<Check>& checks) {
  bool partial = false;
  for (const auto& c : checks) {
    if (c.verdict == Verdict::fail) return kFail;
    partial = partial || c.verdict == Verdict::untestable;
  }
  return partial ? kPartial : kPass;
}

std::string outcome_name(int code) {
  switch (code) {
    case kPass: return "pass";
    case kFail: return "fail";
    default: return "partial";
  }
}

template <class Fn>
auto timed(double& ms, Fn&& fn) {
  auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  if constexpr (std::is_void_v<decltype(fn())>) {
    fn();
    finish();
  } else {
    auto r = fn();
    finish();
    return r;
  }
}

StructureDocument load(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  try {
    return parse_document(text);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<Rational> parse_list(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& t : split(s)) {
    try {
      out.push_back(parse_rational(t));
    } catch (const std::exception&) {
      throw UsageError("not a rational number: " + t);
    }
  }
  return out;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_file(path, text);
}

// check

Outcome run_check(const std::string& file) {
  Outcome o;
  auto doc = load(file);
  const BeliefStructure& b = doc.structure;
  const Domain& d = b.domain();
  Check c;

  auto bounds = timed(c.ms, [&] { return check_bounds(b); });
  o.checks.push_back({"bounds", bounds.passes() ? Verdict::pass : Verdict::fail,
                      bounds.passes() ? "" : (bounds.range_witness ? describe(d, *bounds.range_witness)
                                                                   : describe(d, *bounds.endpoint_witness)),
                      c.ms});
  o.payload["bounds"] = bounds_json(d, bounds);

  std::optional<NegationForm> s;
  std::optional<CombinationForm> f;
  bool closed_form = false;
  try {
    auto ns = timed(c.ms, [&] { return extract_negation(b); });
    if (auto* conflict = std::get_if<NegationConflict>(&ns)) {
      o.checks.push_back({"A1", Verdict::fail, certificate_text(d, RefutationCertificate{*conflict}), c.ms});
      o.payload["A1"] = to_json(d, RefutationCertificate{*conflict});
    } else {
      s = std::get<NegationForm>(ns);
      o.checks.push_back({"A1", Verdict::pass, std::to_string(s->table().size()) + " S entries", c.ms});
    }
    auto cs = timed(c.ms, [&] { return extract_combination(b); });
    if (auto* conflict = std::get_if<CombinationConflict>(&cs)) {
      o.checks.push_back({"A2", Verdict::fail, certificate_text(d, RefutationCertificate{*conflict}), c.ms});
      o.payload["A2"] = to_json(d, RefutationCertificate{*conflict});
    } else {
      f = std::get<CombinationForm>(cs);
      o.checks.push_back({"A2", Verdict::pass, std::to_string(f->table().size()) + " F entries", c.ms});
    }
  } catch (const BudgetExceeded& e) {
    closed_form = !b.is_table();
    Verdict v = closed_form ? Verdict::pass : Verdict::untestable;
    std::string why = closed_form ? "certified from the generating measure" : e.what();
    o.checks.erase(std::remove_if(o.checks.begin(), o.checks.end(),
                                  [](const Check& x) { return x.name == "A1" || x.name == "A2"; }),
                   o.checks.end());
    o.checks.push_back({"A1", v, why, 0});
    o.checks.push_back({"A2", v, why, 0});
  }

  if (f) {
    auto chain = timed(c.ms, [&] { return chain_consistency(*f); });
    std::string detail = chain.certificate ? certificate_text(d, RefutationCertificate{*chain.certificate})
                                           : std::to_string(chain.instances) + " instances" +
                                                 (chain.vacuous ? " (vacuous)" : "");
    o.checks.push_back({"chain-consistency", chain.passes() ? Verdict::pass : Verdict::fail, detail, c.ms});
    o.payload["chain"] = chain_json(d, chain);
  } else {
    o.checks.push_back({"chain-consistency", closed_form ? Verdict::pass : Verdict::untestable,
                        closed_form ? "certified from the generating measure" : "F is not available", 0});
  }

  if (s) {
    auto neg = timed(c.ms, [&] { return bel_level_negation(b, *s); });
    std::string detail = neg.failing_y ? "S(S(" + to_string(*neg.failing_y) + ")) = " + to_string(neg.s_s_y)
                                       : std::to_string(neg.checked) + " values";
    o.checks.push_back({"negation-identity", neg.pass ? Verdict::pass : Verdict::fail, detail, c.ms});
    o.payload["negation_identity"] = negation_identity_json(neg);
  } else {
    o.checks.push_back({"negation-identity", closed_form ? Verdict::pass : Verdict::untestable,
                        closed_form ? "certified from the generating measure" : "S is not available", 0});
  }

  Rational gap = timed(c.ms, [&] { return par5_gap(b); });
  o.payload["par5_gap"] = to_json(gap);
  o.payload["par5_gap_unconditional"] = to_json(par5_gap(b, ValueKind::unconditional));
  o.code = code_of(o.checks);
  o.verdict = outcome_name(o.code);
  return o;
}

// decide

Outcome run_decide(const std::string& file, const DecideOptions& options) {
  Outcome o;
  auto doc = load(file);
  const Domain& d = doc.structure.domain();
  Check c;
  auto v = timed(c.ms, [&] { return decide(doc.structure, options); });
  o.verdict = std::string(verdict_name(v.kind));
  o.code = v.kind == IsomorphismVerdict::Kind::witness ? kPass
           : v.kind == IsomorphismVerdict::Kind::refutation ? kFail
                                                             : kPartial;
  o.checks.push_back({"decide",
                      v.kind == IsomorphismVerdict::Kind::witness      ? Verdict::pass
                      : v.kind == IsomorphismVerdict::Kind::refutation ? Verdict::fail
                                                                        : Verdict::untestable,
                      verdict_text(d, v), c.ms});
  if (v.certificate) {
    auto re = recheck(doc.structure, *v.certificate);
    if (!re.valid) throw std::logic_error("certificate failed its recheck: " + re.reason);
  }
  o.payload = verdict_json(d, v, options);
  return o;
}

// audit

std::vector<BeliefStructure> load_family(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".bel") files.push_back(entry.path());
  if (ec) throw UsageError("cannot read family directory " + dir + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<BeliefStructure> out;
  for (const auto& p : files) out.push_back(load(p.string()).structure);
  return out;
}

Outcome run_audit(const std::string& file, int theorem, const std::string& family_dir, const std::string& extension,
                  AuditInputs inputs) {
  Outcome o;
  std::optional<StructureDocument> doc;
  if (!file.empty()) doc = load(file);
  if (theorem == 3) {
    if (extension.empty()) throw UsageError("--theorem 3 needs --extension FILE");
    auto ext = load(extension);
    inputs.extension = ext.structure;
    inputs.embedding = ext.embeddings;
  }
  if (theorem == 4) {
    if (family_dir.empty()) throw UsageError("--theorem 4 needs --family DIR");
    if (doc) inputs.family.push_back(doc->structure);
    for (auto& m : load_family(family_dir)) inputs.family.push_back(std::move(m));
    if (inputs.family.empty()) throw UsageError("family directory holds no .bel files");
  }
  if (!doc && theorem != 4) throw UsageError("audit needs a structure FILE");
  const BeliefStructure& b = doc ? doc->structure : inputs.family.front();
  Check c;
  AuditReport r;
  try {
    r = timed(c.ms, [&] { return audit(b, theorem, inputs); });
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  for (const auto& h : r.hypotheses) {
    std::string detail = h.witness.empty() ? h.note : h.note.empty() ? h.witness : h.witness + " (" + h.note + ")";
    if (h.vacuous) detail += " [vacuous]";
    o.checks.push_back({h.name, h.verdict, detail, 0});
  }
  o.checks.back().ms = c.ms;
  o.code = code_of(o.checks);
  o.verdict = std::string(verdict_name(r.overall()));
  o.payload = audit_json(r);
  o.payload["text"] = audit_text(r);
  return o;
}

// equations

Outcome run_equations(const std::string& form, const std::string& eq_name, std::size_t grid,
                      const std::string& structure, bool table_points) {
  Outcome o;
  auto eq = parse_equation(eq_name);
  if (!eq) throw UsageError("unknown equation " + eq_name + " (EQ1, EQ3, EQ3.5, EQSYM)");
  const bool binary = *eq == EquationId::associativity;
  EquationOptions options;
  options.table_points = table_points;
  Check c;
  ResidualReport r;
  try {
    if (form == "extracted") {
      if (structure.empty()) throw UsageError("--form extracted needs --structure FILE");
      auto doc = load(structure);
      if (binary) {
        auto ex = extract_combination(doc.structure);
        if (!std::holds_alternative<CombinationForm>(ex)) throw PreconditionError("A2 fails: F is not single-valued");
        r = timed(c.ms, [&] { return check_functional_equation(std::get<CombinationForm>(ex), *eq, grid, options); });
      } else {
        auto ex = extract_negation(doc.structure);
        if (!std::holds_alternative<NegationForm>(ex)) throw PreconditionError("A1 fails: S is not single-valued");
        r = timed(c.ms, [&] { return check_functional_equation(std::get<NegationForm>(ex), *eq, grid, options); });
      }
    } else if (auto f = combination_from_name(form)) {
      if (!binary) throw UsageError(form + " is a combination form; use --eq EQ1");
      r = timed(c.ms, [&] { return check_functional_equation(*f, *eq, grid, options); });
    } else if (auto s = negation_from_name(form)) {
      if (binary) throw UsageError(form + " is a negation form; use --eq EQ3, EQ3.5 or EQSYM");
      r = timed(c.ms, [&] { return check_functional_equation(*s, *eq, grid, options); });
    } else {
      throw UsageError("unknown form " + form + " (linear-complement, product, minimum, hamacher, extracted)");
    }
  } catch (const EmptyEvaluation& e) {
    o.code = kPartial;
    o.verdict = "partial";
    o.checks.push_back({std::string(equation_name(*eq)), Verdict::untestable, e.what(), 0});
    o.payload = Json{{"equation", std::string(equation_name(*eq))}, {"grid", grid}, {"error", e.what()}};
    return o;
  } catch (const PreconditionError& e) {
    o.code = kFail;
    o.verdict = "fail";
    o.checks.push_back({std::string(equation_name(*eq)), Verdict::fail, e.what(), 0});
    o.payload = Json{{"equation", std::string(equation_name(*eq))}, {"grid", grid}, {"error", e.what()}};
    return o;
  }
  Verdict v = r.residual != 0 ? Verdict::fail : r.partial ? Verdict::untestable : Verdict::pass;
  o.checks.push_back({std::string(equation_name(*eq)), v, residual_text(r), c.ms});
  o.code = code_of(o.checks);
  o.verdict = outcome_name(o.code);
  o.payload = residual_json(r);
  return o;
}

// search-min

Outcome run_search(std::size_t atoms, const std::string& grid_text, const std::string& out_path, bool regular,
                   const DecideOptions& decide_options, const std::string& echo, std::ostream& out) {
  Outcome o;
  CounterexampleOptions options;
  options.regular = regular;
  options.decide = decide_options;
  auto grid = parse_list(grid_text);
  Check c;
  CounterexampleSearch s;
  try {
    s = timed(c.ms, [&] { return search_min_counterexample(atoms, grid, options); });
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ostringstream summary;
  summary << "candidates " << s.candidates << ", isomorphic " << s.isomorphic << ", unknown " << s.unknown;
  if (s.hit) {
    o.code = kPass;
    o.verdict = "hit";
    std::ostringstream file;
    file << "# min/1-x counterexample generated by: " << echo << "\n";
    file << "# canonical candidate " << s.candidates << "; certificate " << s.certificate->kind() << "\n";
    file << serialize(*s.hit, true);
    emit(out_path, file.str(), out);
    o.payload = search_json(&s.hit->domain(), s);
    summary << "; certificate " << s.certificate->kind();
  } else {
    o.code = kFail;
    o.verdict = "exhausted";
    o.payload = search_json(nullptr, s);
  }
  o.checks.push_back({"search-min", s.hit ? Verdict::pass : Verdict::fail, summary.str(), c.ms});
  return o;
}

// generate

Domain domain_from(const std::string& atoms, std::size_t n) {
  auto names = split(atoms);
  if (names.empty()) {
    for (std::size_t i = 0; i < n; ++i) names.push_back(n <= 26 ? std::string(1, static_cast<char>('a' + i))
                                                                 : "a" + std::to_string(i));
  }
  if (names.size() != n) throw UsageError("--atoms lists " + std::to_string(names.size()) + " names for " +
                                          std::to_string(n) + " weights");
  return Domain(names);
}

Outcome run_generate(const std::string& kind, const std::string& atoms, const std::string& weights_text, unsigned k,
                     unsigned coins, unsigned n_max, const std::string& out_path, const std::string& base_path,
                     bool expand, std::ostream& out) {
  Outcome o;
  o.verdict = "pass";
  Check c;
  try {
    if (kind == "family") {
      if (out_path.empty()) throw UsageError("generate family needs --out DIR");
      std::filesystem::create_directories(out_path);
      for (unsigned n = 1; n <= n_max; ++n) {
        char name[16];
        std::snprintf(name, sizeof name, "c%02u.bel", n);
        write_file((std::filesystem::path(out_path) / name).string(), serialize(coin_domain(n)));
      }
      o.payload = Json{{"kind", kind}, {"members", n_max}, {"dir", out_path}};
      o.checks.push_back({"generate", Verdict::pass, std::to_string(n_max) + " members", 0});
      return o;
    }
    auto weights = parse_list(weights_text);
    if (weights.empty()) throw UsageError("--weights is required");
    Domain d = domain_from(atoms, weights.size());
    std::string text;
    if (kind == "probability" || kind == "distorted") {
      auto b = kind == "probability" ? gen_probability(d, weights) : gen_distorted(d, weights, k);
      text = serialize(b, expand);
    } else if (kind == "coins") {
      auto ext = timed(c.ms, [&] { return coin_extend(d, weights, coins); });
      StructureDocument doc{ext.extended, GeneratorSpec{1, {}}, ext.directives(), 0};
      doc.generator->weights = ext.extended.weights();
      text = serialize(doc);
      if (!base_path.empty()) write_file(base_path, serialize(ext.base, expand));
    } else {
      throw UsageError("unknown generator " + kind);
    }
    emit(out_path, text, out);
    o.payload = Json{{"kind", kind}, {"atoms", d.size()}, {"out", out_path.empty() ? "-" : out_path}};
    o.checks.push_back({"generate", Verdict::pass, "", c.ms});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const BudgetExceeded& e) {
    throw UsageError(e.what());
  }
  return o;
}

std::string quote(const std::vector<std::string>& args) {
  std::string s = "coxcheck";
  for (const auto& a : args) s += " " + (a.find(' ') == std::string::npos && !a.empty() ? a : "\"" + a + "\"");
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Checks conditional belief structures against Cox-style hypotheses", "coxcheck"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "coxcheck 1.0");

  std::string json_path, file, family_dir, extension, form, eq, grid_text, out_path, base_path, atoms, weights;
  std::uint64_t seed = 0;
  int theorem = 1;
  std::size_t grid = 0, n_atoms = 3, family_grid = 11;
  std::string epsilon = "1/20";
  unsigned k = 2, coins = 1, n_max = 12;
  bool expand = false, all_values = false, table_points = false;
  DecideOptions decide_options;
  double tolerance = 1e-9;
  auto add_common = [&](CLI::App* sub, bool seeded) {
    sub->add_option("--json", json_path, "write the structured report to PATH");
    if (seeded) sub->add_option("--seed", seed, "seed for randomized phases")->capture_default_str();
  };

  auto* check = app.add_subcommand("check", "bounds, A1/A2 extraction, chain consistency, negation identity, gap");
  check->add_option("FILE", file, "structure file")->required();
  add_common(check, true);

  auto* decide_cmd = app.add_subcommand("decide", "decide isomorphism to a probability measure");
  decide_cmd->add_option("FILE", file, "structure file")->required();
  decide_cmd->add_option("--restarts", decide_options.restarts, "descent restarts")->capture_default_str();
  decide_cmd->add_option("--budget", decide_options.budget, "iterations per restart")->capture_default_str();
  decide_cmd->add_option("--tol", tolerance, "numeric tolerance")->capture_default_str();
  add_common(decide_cmd, true);

  auto* audit_cmd = app.add_subcommand("audit", "audit the hypotheses of a theorem");
  audit_cmd->add_option("FILE", file, "structure file (optional for theorem 4)");
  audit_cmd->add_option("--theorem", theorem, "1, 2, 3 or 4")->required()->check(CLI::Range(1, 4));
  audit_cmd->add_option("--family", family_dir, "directory of .bel members (theorem 4)");
  audit_cmd->add_option("--extension", extension, "extended structure with embed directives (theorem 3)");
  audit_cmd->add_option("--grid", family_grid, "density grid points per axis (theorem 4)")->capture_default_str();
  audit_cmd->add_option("--epsilon", epsilon, "density tolerance (theorem 4)")->capture_default_str();
  add_common(audit_cmd, true);

  auto* generate = app.add_subcommand("generate", "write generated structure files");
  generate->require_subcommand(1);
  std::string gen_kind;
  for (const char* kind : {"probability", "distorted", "coins", "family"}) {
    auto* g = generate->add_subcommand(kind);
    g->callback([&gen_kind, kind] { gen_kind = kind; });
    g->add_option("--out", out_path, std::string(kind) == "family" ? "output directory" : "output file (default stdout)");
    if (std::string(kind) == "family") {
      g->add_option("--max", n_max, "largest member {0,1}^n")->capture_default_str()->check(CLI::Range(1, 12));
    } else {
      g->add_option("--weights", weights, "comma-separated weights summing to 1")->required();
      g->add_option("--atoms", atoms, "comma-separated atom names");
      g->add_flag("--expand", expand, "write every table entry instead of the generator directive");
    }
    if (std::string(kind) == "distorted") g->add_option("--k", k, "exponent")->capture_default_str();
    if (std::string(kind) == "coins") {
      g->add_option("--coins", coins, "number of fair coins")->capture_default_str();
      g->add_option("--base", base_path, "also write the base structure");
    }
    add_common(g, false);
  }

  auto* search = app.add_subcommand("search-min", "search for a min/1-x structure with no probability rescaling");
  search->add_option("--atoms", n_atoms, "number of atoms (1..4)")->capture_default_str();
  search->add_option("--grid", grid_text, "comma-separated value grid")->required();
  search->add_option("--out", out_path, "fixture file for the first hit (default stdout)");
  search->add_flag("--all-values", all_values, "allow e and E as free table values");
  add_common(search, true);

  auto* equations = app.add_subcommand("equations", "functional equation residuals");
  equations->add_option("--form", form, "linear-complement, product, minimum, hamacher or extracted")->required();
  equations->add_option("--eq", eq, "EQ1, EQ3, EQ3.5 or EQSYM")->required();
  equations->add_option("--grid", grid, "grid points per axis")->required();
  equations->add_option("--structure", file, "structure to extract from (--form extracted)");
  equations->add_flag("--table-points", table_points, "evaluate on the table's own arguments");
  add_common(equations, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kUsage;
  }

  Outcome o;
  std::string command;
  auto start = std::chrono::steady_clock::now();
  try {
    decide_options.seed = seed;
    decide_options.tolerance = static_cast<long double>(tolerance);
    if (check->parsed()) {
      command = "check";
      o = run_check(file);
    } else if (decide_cmd->parsed()) {
      command = "decide";
      o = run_decide(file, decide_options);
    } else if (audit_cmd->parsed()) {
      command = "audit";
      AuditInputs inputs;
      inputs.decide = decide_options;
      inputs.family_grid = family_grid;
      inputs.family_epsilon = parse_list(epsilon).at(0);
      inputs.density.search.seed = seed;
      o = run_audit(file, theorem, family_dir, extension, inputs);
    } else if (generate->parsed()) {
      command = "generate";
      o = run_generate(gen_kind, atoms, weights, k, coins, n_max, out_path, base_path, expand, out);
    } else if (search->parsed()) {
      command = "search-min";
      std::string echo = "coxcheck search-min --atoms " + std::to_string(n_atoms) + " --grid \"" + grid_text + "\"";
      if (all_values) echo += " --all-values";
      if (seed != 0) echo += " --seed " + std::to_string(seed);
      o = run_search(n_atoms, grid_text, out_path, !all_values, decide_options, echo, out);
    } else if (equations->parsed()) {
      command = "equations";
      o = run_equations(form, eq, grid, file, table_points);
    }
  } catch (const UsageError& e) {
    err << "coxcheck: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "coxcheck: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const std::out_of_range&) {
    err << "coxcheck: --epsilon needs a rational value\n";
    return kUsage;
  }
  double total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  bool quiet_text = (command == "generate" || command == "search-min") && (out_path.empty() || out_path == "-");
  std::ostream& text = quiet_text ? err : out;
  text << command << ": " << o.verdict << "\n";
  for (const auto& c : o.checks) {
    text << "  " << c.name << ": " << verdict_name(c.verdict);
    if (!c.detail.empty()) {
      std::string detail = c.detail;
      while (!detail.empty() && detail.back() == '\n') detail.pop_back();
      if (detail.find('\n') == std::string::npos) {
        text << "  " << detail << "\n";
      } else {
        text << "\n";
        std::istringstream lines(detail);
        for (std::string line; std::getline(lines, line);) text << "    " << line << "\n";
      }
    } else {
      text << "\n";
    }
  }
  if (o.payload.contains("notes"))
    for (const auto& n : o.payload["notes"]) text << "  note: " << n.get<std::string>() << "\n";
  if (command == "check") text << "  par5 gap: " << o.payload["par5_gap"].get<std::string>() << "\n";
  text << "exit " << o.code << "\n";

  if (!json_path.empty()) {
    Json checks = Json::array();
    Json timings = Json::object();
    for (const auto& c : o.checks) {
      checks.push_back(Json{{"name", c.name}, {"verdict", std::string(verdict_name(c.verdict))}, {"detail", c.detail}});
      if (c.ms > 0) timings[c.name] = c.ms;
    }
    timings["total"] = total_ms;
    Json report{{"command", quote(args)}, {"subcommand", command},   {"seed", seed},
                {"verdict", o.verdict},   {"exit_code", o.code},     {"checks", checks},
                {"timings_ms", timings},  {"payload", o.payload}};
    try {
      write_file(json_path, report.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << "coxcheck: " << e.what() << "\n";
      return kUsage;
    }
  }
  return o.code;
}

}  // namespace coxcheck::cli
