#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace provkg {

/// Opaque integer identifier; the tag keeps node, predicate and edge ids apart.
template <typename Tag, typename Rep = std::uint32_t>
class StrongId {
 public:
  using rep_type = Rep;

  constexpr StrongId() = default;
  constexpr explicit StrongId(Rep value) : value_(value) {}

  constexpr Rep value() const { return value_; }
  constexpr bool valid() const { return value_ != kInvalid; }

  static constexpr StrongId invalid() { return StrongId(kInvalid); }

  friend constexpr auto operator<=>(const StrongId&, const StrongId&) = default;

 private:
  static constexpr Rep kInvalid = std::numeric_limits<Rep>::max();
  Rep value_ = kInvalid;
};

struct NodeTag {};
struct PredicateTag {};
struct EdgeTag {};

using NodeId = StrongId<NodeTag>;
using PredicateId = StrongId<PredicateTag>;
using EdgeId = StrongId<EdgeTag, std::uint64_t>;

inline std::size_t hash_combine(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

/// A tuple of node bindings; column meaning is owned by whoever holds the row.
using Row = std::vector<NodeId>;

struct RowHash {
  std::size_t operator()(const Row& row) const {
    std::size_t h = row.size();
    for (NodeId n : row) h = hash_combine(h, n.value());
    return h;
  }
};

}  // namespace provkg

template <typename Tag, typename Rep>
struct std::hash<provkg::StrongId<Tag, Rep>> {
  std::size_t operator()(const provkg::StrongId<Tag, Rep>& id) const noexcept {
    return std::hash<Rep>{}(id.value());
  }
};
