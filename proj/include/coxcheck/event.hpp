#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coxcheck {

/// Subset of a domain's atoms, stored as a bitset sized to the domain.
class Event {
 public:
  Event() = default;
  explicit Event(std::size_t universe);

  static Event from_mask(std::uint64_t mask, std::size_t universe);
  static Event full(std::size_t universe);

  std::size_t universe() const { return universe_; }
  bool contains(std::size_t atom) const;
  void insert(std::size_t atom);
  void erase(std::size_t atom);

  std::size_t count() const;
  bool empty() const;
  bool subset_of(const Event& other) const;

  /// Only valid for universes of at most 64 atoms.
  std::uint64_t mask() const;
  std::vector<std::size_t> members() const;

  Event operator&(const Event& other) const;
  Event operator|(const Event& other) const;
  /// Set difference.
  Event operator-(const Event& other) const;
  Event complement() const;

  bool operator==(const Event& other) const = default;
  std::strong_ordering operator<=>(const Event& other) const;

  std::size_t hash() const;

 private:
  void trim();

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct EventHash {
  std::size_t operator()(const Event& e) const { return e.hash(); }
};

/// Ordered, duplicate-free list of atom names. The order fixes the canonical event encoding.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<std::string> atoms);

  std::size_t size() const { return atoms_.size(); }
  const std::string& atom(std::size_t i) const { return atoms_.at(i); }
  const std::vector<std::string>& atoms() const { return atoms_; }
  std::optional<std::size_t> find(std::string_view name) const;

  Event empty_event() const { return Event(size()); }
  Event full_event() const { return Event::full(size()); }

  /// Builds an event from atom names; throws std::invalid_argument on unknown atoms.
  Event event(const std::vector<std::string>& names) const;

  /// "{a b}" with atoms in domain order.
  std::string format(const Event& e) const;

  bool operator==(const Domain& other) const { return atoms_ == other.atoms_; }

 private:
  std::vector<std::string> atoms_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace coxcheck
