#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <limits>

namespace beltamp {

/// Dense 0-based index into one of the environment tables.
template <class Tag>
struct Index {
  std::size_t value = std::numeric_limits<std::size_t>::max();

  constexpr Index() = default;
  constexpr explicit Index(std::size_t v) : value(v) {}

  constexpr bool valid() const { return value != std::numeric_limits<std::size_t>::max(); }
  constexpr auto operator<=>(const Index&) const = default;
};

using RoomId = Index<struct RoomTag>;
using SurfaceId = Index<struct SurfaceTag>;
using ObjectId = Index<struct ObjectTag>;

}  // namespace beltamp

template <class Tag>
struct std::hash<beltamp::Index<Tag>> {
  std::size_t operator()(const beltamp::Index<Tag>& i) const noexcept {
    return std::hash<std::size_t>{}(i.value);
  }
};
