#include "coxcheck/event.hpp"

#include <bit>
#include <stdexcept>

namespace coxcheck {

namespace {
constexpr std::size_t kWordBits = 64;
std::size_t words_for(std::size_t universe) { return (universe + kWordBits - 1) / kWordBits; }
}  // namespace

Event::Event(std::size_t universe) : universe_(universe), words_(words_for(universe), 0) {}

Event Event::from_mask(std::uint64_t mask, std::size_t universe) {
  if (universe > kWordBits) throw std::invalid_argument("Event::from_mask: universe exceeds 64 atoms");
  Event e(universe);
  if (!e.words_.empty()) e.words_[0] = mask;
  e.trim();
  return e;
}

Event Event::full(std::size_t universe) {
  Event e(universe);
  for (auto& w : e.words_) w = ~std::uint64_t{0};
  e.trim();
  return e;
}

void Event::trim() {
  if (universe_ % kWordBits != 0 && !words_.empty())
    words_.back() &= (std::uint64_t{1} << (universe_ % kWordBits)) - 1;
}

bool Event::contains(std::size_t atom) const {
  if (atom >= universe_) return false;
  return (words_[atom / kWordBits] >> (atom % kWordBits)) & 1U;
}

void Event::insert(std::size_t atom) {
  if (atom >= universe_) throw std::out_of_range("Event::insert: atom outside domain");
  words_[atom / kWordBits] |= std::uint64_t{1} << (atom % kWordBits);
}

void Event::erase(std::size_t atom) {
  if (atom >= universe_) return;
  words_[atom / kWordBits] &= ~(std::uint64_t{1} << (atom % kWordBits));
}

std::size_t Event::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool Event::empty() const {
  for (auto w : words_)
    if (w != 0) return false;
  return true;
}

bool Event::subset_of(const Event& other) const {
  if (other.universe_ != universe_) throw std::invalid_argument("Event: universe mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~other.words_[i]) return false;
  return true;
}

std::uint64_t Event::mask() const {
  if (universe_ > kWordBits) throw std::logic_error("Event::mask: universe exceeds 64 atoms");
  return words_.empty() ? 0 : words_[0];
}

std::vector<std::size_t> Event::members() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits) {
      out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

Event Event::operator&(const Event& other) const {
  if (other.universe_ != universe_) throw std::invalid_argument("Event: universe mismatch");
  Event r(*this);
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= other.words_[i];
  return r;
}

Event Event::operator|(const Event& other) const {
  if (other.universe_ != universe_) throw std::invalid_argument("Event: universe mismatch");
  Event r(*this);
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] |= other.words_[i];
  return r;
}

Event Event::operator-(const Event& other) const {
  if (other.universe_ != universe_) throw std::invalid_argument("Event: universe mismatch");
  Event r(*this);
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= ~other.words_[i];
  return r;
}

Event Event::complement() const {
  Event r(*this);
  for (auto& w : r.words_) w = ~w;
  r.trim();
  return r;
}

std::strong_ordering Event::operator<=>(const Event& other) const {
  if (auto c = universe_ <=> other.universe_; c != 0) return c;
  // Compare as big integers, most significant word first.
  for (std::size_t i = words_.size(); i-- > 0;)
    if (auto c = words_[i] <=> other.words_[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::size_t Event::hash() const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ universe_;
  for (auto w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Domain::Domain(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("domain must contain at least one atom");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& name = atoms_[i];
    if (name.empty()) throw std::invalid_argument("empty atom name");
    for (char c : name)
      if (c == '{' || c == '}' || c == '|' || c == '=' || c == '*' || c == '#' || c == ',' ||
          c == ' ' || c == '\t')
        throw std::invalid_argument("atom name contains a reserved character: " + name);
    if (!index_.emplace(name, i).second) throw std::invalid_argument("duplicate atom name: " + name);
  }
}

std::optional<std::size_t> Domain::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Event Domain::event(const std::vector<std::string>& names) const {
  Event e(size());
  for (const auto& n : names) {
    auto i = find(n);
    if (!i) throw std::invalid_argument("unknown atom: " + n);
    e.insert(*i);
  }
  return e;
}

std::string Domain::format(const Event& e) const {
  std::string out = "{";
  bool first = true;
  for (auto i : e.members()) {
    if (!first) out += ' ';
    out += atoms_[i];
    first = false;
  }
  out += '}';
  return out;
}

}  // namespace coxcheck
