#pragma once

#include "coxcheck/belief.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coxcheck {

/// `generate probability|distorted` directive.
struct GeneratorSpec {
  unsigned exponent = 1;  // 1 = probability
  std::vector<Rational> weights;
};

/// `embed a = {x y}`: the base atom `a` corresponds to the extended event {x, y}.
struct EmbedDirective {
  std::string base_atom;
  std::vector<std::string> image;
};

struct StructureDocument {
  BeliefStructure structure;
  std::optional<GeneratorSpec> generator;
  std::vector<EmbedDirective> embeddings;
  std::size_t explicit_entries = 0;
};

/// Line-based structure format:
///   domain: a b c
///   bounds: 0 1
///   bel {a b} | {a b c} = 2/3      (W may be written *)
///   generate probability a=1/3 b=1/3 c=1/3
///   generate distorted k=2 a=1/3 b=2/3
///   embed a = {a.0 a.1}
/// Explicit `bel` lines override generated values. Throws ParseError / IncompleteTableError.
StructureDocument parse_document(std::string_view text);
BeliefStructure parse_structure(std::string_view text);

/// Measure-backed structures serialize as a generator directive unless `expand` is set;
/// tables emit one `bel` line per pair V ⊆ U in canonical order.
std::string serialize(const BeliefStructure& b, bool expand = false);
std::string serialize(const StructureDocument& doc);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace coxcheck
