#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace flpf {

/// Hard ceiling on links per graph; the enumeration cap is usually far lower.
inline constexpr std::size_t kMaxLinks = 64;

/// A subset of the links {0, ..., K-1}, stored as a bitmask.
class LinkSet {
 public:
  constexpr LinkSet() = default;
  constexpr explicit LinkSet(std::uint64_t bits) : bits_(bits) {}
  LinkSet(std::initializer_list<std::size_t> members) {
    for (auto m : members) insert(m);
  }

  static constexpr LinkSet all(std::size_t n) {
    return LinkSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }
  static constexpr LinkSet single(std::size_t l) { return LinkSet(std::uint64_t{1} << l); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool contains(std::size_t l) const { return (bits_ >> l) & 1U; }
  constexpr bool is_subset_of(LinkSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(LinkSet other) const { return (bits_ & other.bits_) != 0; }
  /// Lowest member; undefined on an empty set.
  constexpr std::size_t front() const { return static_cast<std::size_t>(std::countr_zero(bits_)); }

  void insert(std::size_t l) { bits_ |= std::uint64_t{1} << l; }
  void erase(std::size_t l) { bits_ &= ~(std::uint64_t{1} << l); }

  /// Members in increasing index order.
  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
  }

  friend constexpr LinkSet operator|(LinkSet a, LinkSet b) { return LinkSet(a.bits_ | b.bits_); }
  friend constexpr LinkSet operator&(LinkSet a, LinkSet b) { return LinkSet(a.bits_ & b.bits_); }
  friend constexpr LinkSet operator-(LinkSet a, LinkSet b) { return LinkSet(a.bits_ & ~b.bits_); }
  friend constexpr bool operator==(LinkSet a, LinkSet b) = default;

  /// Lexicographic order on the sorted member lists ({0,2} < {0,3} < {1}).
  friend bool lex_less(LinkSet a, LinkSet b) {
    std::uint64_t x = a.bits_, y = b.bits_;
    while (x != 0 && y != 0) {
      auto lx = std::countr_zero(x), ly = std::countr_zero(y);
      if (lx != ly) return lx < ly;
      x &= x - 1;
      y &= y - 1;
    }
    return x == 0 && y != 0;
  }

 private:
  std::uint64_t bits_ = 0;
};

/// Visit all subsets of `universe` (including the empty set) in increasing
/// bitmask order.
template <typename Fn>
void for_each_subset(LinkSet universe, Fn&& fn) {
  const std::uint64_t u = universe.bits();
  std::uint64_t s = 0;
  while (true) {
    fn(LinkSet(s));
    if (s == u) break;
    s = (s - u) & u;
  }
}

}  // namespace flpf
