#ifndef MARTLAB_GRID_HPP
#define MARTLAB_GRID_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace martlab {

// Dyadic grid D_n = {i / 2^n : i = 0..2^n} on [0,1]. level == n.
struct DyadicGrid {
  int level = 0;

  std::size_t n_steps() const { return std::size_t{1} << level; }
  std::size_t n_points() const { return n_steps() + 1; }
  double dt() const { return std::ldexp(1.0, -level); }
  // exact: i * 2^-n is a dyadic rational, representable for level <= 20
  double time(std::size_t i) const {
    return std::ldexp(static_cast<double>(i), -level);
  }
};

inline constexpr int kMaxGridLevel = 20;

inline DyadicGrid make_grid(int level) {
  if (level < 0)
    throw std::invalid_argument("grid level must be non-negative, got " +
                                std::to_string(level));
  if (level > kMaxGridLevel)
    throw std::length_error("grid level " + std::to_string(level) +
                            " exceeds cap " + std::to_string(kMaxGridLevel) +
                            " (2^level + 1 points per path)");
  return DyadicGrid{level};
}

// step ratio between a fine grid and a coarse sub-grid living inside it
inline std::size_t sub_step(const DyadicGrid& fine, int coarse_level) {
  if (coarse_level < 0 || coarse_level > fine.level)
    throw std::invalid_argument(
        "sub-grid level must lie in [0, fine level]; got " +
        std::to_string(coarse_level) + " vs fine " +
        std::to_string(fine.level));
  return std::size_t{1} << (fine.level - coarse_level);
}

}  // namespace martlab

#endif
