#include "coxcheck/structure_io.hpp"

#include "coxcheck/errors.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace coxcheck {

namespace {

class LineCursor {
 public:
  LineCursor(std::string_view line, std::size_t number) : s_(line), line_(number) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '{' &&
           s_[pos_] != '}' && s_[pos_] != '|' && s_[pos_] != '=')
      ++pos_;
    if (start == pos_) fail("expected a token");
    return std::string(s_.substr(start, pos_ - start));
  }
  std::vector<std::string> atom_list() {
    expect('{');
    std::vector<std::string> atoms;
    while (!accept('}')) {
      if (done()) fail("unterminated event");
      atoms.push_back(word());
    }
    return atoms;
  }
  std::string rest() {
    skip_ws();
    return std::string(s_.substr(pos_));
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }
  std::size_t line() const { return line_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

Event parse_event(LineCursor& cur, const Domain& domain) {
  if (cur.accept('*')) return domain.full_event();
  auto names = cur.atom_list();
  Event e(domain.size());
  for (const auto& n : names) {
    auto i = domain.find(n);
    if (!i) cur.fail("unknown atom '" + n + "'");
    e.insert(*i);
  }
  return e;
}

Rational parse_value(LineCursor& cur, const std::string& token) {
  try {
    return parse_rational(token);
  } catch (const std::invalid_argument& e) {
    cur.fail(e.what());
  }
}

struct PendingEntry {
  Event v, u;
  Rational value;
  std::size_t line;
};

}  // namespace

StructureDocument parse_document(std::string_view text) {
  std::optional<Domain> domain;
  std::optional<Bounds> bounds;
  std::optional<GeneratorSpec> generator;
  std::size_t generator_line = 0;
  std::vector<PendingEntry> entries;
  std::vector<EmbedDirective> embeds;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    LineCursor cur(raw, number);
    if (cur.done()) continue;
    std::string head = cur.word();
    if (head == "domain:" || (head == "domain" && cur.accept(':'))) {
      if (domain) cur.fail("duplicate domain line");
      std::vector<std::string> atoms;
      while (!cur.done()) atoms.push_back(cur.word());
      try {
        domain.emplace(std::move(atoms));
      } catch (const std::invalid_argument& e) {
        cur.fail(e.what());
      }
      continue;
    }
    if (!domain) cur.fail("the domain line must come first");
    if (head == "bounds:" || (head == "bounds" && cur.accept(':'))) {
      if (bounds) cur.fail("duplicate bounds line");
      Rational lo = parse_value(cur, cur.word());
      Rational hi = parse_value(cur, cur.word());
      if (!cur.done()) cur.fail("trailing input after bounds");
      if (!(lo < hi)) cur.fail("bounds require lo < hi");
      bounds = Bounds{lo, hi};
    } else if (head == "bel") {
      Event v = parse_event(cur, *domain);
      cur.expect('|');
      Event u = parse_event(cur, *domain);
      cur.expect('=');
      Rational value = parse_value(cur, cur.word());
      if (!cur.done()) cur.fail("trailing input after value");
      if (u.empty()) cur.fail("conditioning event must be nonempty");
      entries.push_back({v & u, u, value, number});
    } else if (head == "generate") {
      if (generator) cur.fail("only one generate directive is allowed");
      std::string kind = cur.word();
      GeneratorSpec spec;
      std::vector<std::optional<Rational>> weights(domain->size());
      if (kind != "probability" && kind != "distorted") cur.fail("unknown generator '" + kind + "'");
      bool saw_k = false;
      while (!cur.done()) {
        std::string key = cur.word();
        cur.expect('=');
        std::string value = cur.word();
        if (kind == "distorted" && key == "k") {
          Rational k = parse_value(cur, value);
          if (k.get_den() != 1 || k < 1 || k > 64) cur.fail("exponent k must be an integer in [1, 64]");
          spec.exponent = static_cast<unsigned>(k.get_num().get_ui());
          saw_k = true;
          continue;
        }
        auto i = domain->find(key);
        if (!i) cur.fail("unknown atom '" + key + "'");
        if (weights[*i]) cur.fail("duplicate weight for atom '" + key + "'");
        weights[*i] = parse_value(cur, value);
      }
      if (kind == "distorted" && !saw_k) cur.fail("distorted generator needs k=<exponent>");
      Rational total = 0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!weights[i]) cur.fail("missing weight for atom '" + domain->atom(i) + "'");
        if (*weights[i] <= 0) cur.fail("weights must be strictly positive");
        total += *weights[i];
        spec.weights.push_back(*weights[i]);
      }
      if (total != 1) cur.fail("weights must sum to 1 (got " + to_string(total) + ")");
      generator = std::move(spec);
      generator_line = number;
    } else if (head == "embed") {
      EmbedDirective d;
      d.base_atom = cur.word();
      cur.expect('=');
      d.image = cur.atom_list();
      if (!cur.done()) cur.fail("trailing input after embed image");
      embeds.push_back(std::move(d));
    } else {
      cur.fail("unknown directive '" + head + "'");
    }
  }
  if (!domain) throw ParseError(0, "missing domain line");
  Bounds bnd = bounds.value_or(Bounds{});

  // Explicit entries must agree among themselves.
  std::optional<TableBuilder> explicit_table;
  if (!entries.empty()) {
    if (domain->size() > BeliefStructure::kMaxTableAtoms)
      throw ParseError(entries.front().line, "explicit bel entries need a domain of at most " +
                                                 std::to_string(BeliefStructure::kMaxTableAtoms) + " atoms");
    explicit_table.emplace(*domain, bnd);
    for (const auto& e : entries) {
      if (explicit_table->set(e.v, e.u, e.value) == TableBuilder::SetResult::conflict)
        throw ParseError(e.line, "conflicting entry for (" + domain->format(e.v) + " | " +
                                     domain->format(e.u) + "): " + to_string(e.value) + " vs " +
                                     to_string(*explicit_table->get(e.v, e.u)));
    }
  }

  auto build = [&]() -> BeliefStructure {
    if (generator) {
      auto generated = BeliefStructure::from_measure(*domain, generator->weights, generator->exponent, bnd);
      if (entries.empty()) return generated;
      if (domain->size() > BeliefStructure::kMaxTableAtoms)
        throw ParseError(generator_line, "domain too large to override generated entries");
      TableBuilder merged(generated);
      for (const auto& e : entries) merged.set(e.v, e.u, e.value, /*overwrite=*/true);
      return merged.build();
    }
    if (!explicit_table) {
      if (domain->size() > BeliefStructure::kMaxTableAtoms)
        throw ParseError(0, "no entries and no generator for a domain too large to tabulate");
      explicit_table.emplace(*domain, bnd);
    }
    return explicit_table->build();
  };
  return StructureDocument{build(), generator, std::move(embeds), entries.size()};
}

BeliefStructure parse_structure(std::string_view text) { return parse_document(text).structure; }

namespace {

std::string format_event(const Domain& d, const Event& e) {
  if (e == d.full_event() && d.size() > 1) return "*";
  return d.format(e);
}

void write_header(std::ostringstream& out, const BeliefStructure& b) {
  out << "domain:";
  for (const auto& a : b.domain().atoms()) out << ' ' << a;
  out << '\n';
  if (!(b.bounds() == Bounds{})) out << "bounds: " << to_string(b.bounds().lo) << ' ' << to_string(b.bounds().hi) << '\n';
}

}  // namespace

std::string serialize(const BeliefStructure& b, bool expand) {
  std::ostringstream out;
  write_header(out, b);
  if (!b.is_table() && !expand) {
    if (b.exponent() == 1)
      out << "generate probability";
    else
      out << "generate distorted k=" << b.exponent();
    for (std::size_t i = 0; i < b.atom_count(); ++i)
      out << ' ' << b.domain().atom(i) << '=' << to_string(b.weights()[i]);
    out << '\n';
    return out.str();
  }
  const std::size_t n = b.atom_count();
  if (n > BeliefStructure::kMaxTableAtoms) throw BudgetExceeded("table too large to serialize entry by entry");
  for (std::uint64_t u = 1; u < (std::uint64_t{1} << n); ++u) {
    Event ue = Event::from_mask(u, n);
    for (std::uint64_t v = 0;; v = (v - u) & u) {
      Event ve = Event::from_mask(v, n);
      out << "bel " << format_event(b.domain(), ve) << " | " << format_event(b.domain(), ue) << " = "
          << to_string(b.bel(ve, ue)) << '\n';
      if (v == u) break;
    }
  }
  return out.str();
}

std::string serialize(const StructureDocument& doc) {
  std::string out = serialize(doc.structure);
  for (const auto& e : doc.embeddings) {
    out += "embed " + e.base_atom + " = {";
    for (std::size_t i = 0; i < e.image.size(); ++i) out += (i ? " " : "") + e.image[i];
    out += "}\n";
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace coxcheck
