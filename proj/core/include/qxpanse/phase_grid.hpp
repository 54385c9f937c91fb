#pragma once

#include <cstddef>

namespace qxpanse {

// Regular rectangular lattice in (u, v). Flattened index k = i * np + j.
struct PhaseGrid {
  std::size_t nx = 0;
  std::size_t np = 0;
  double x0 = 0.0;  // u of column i = 0
  double p0 = 0.0;  // v of row j = 0
  double hx = 1.0;
  double hp = 1.0;

  // Lattice symmetric about (cu, cv).
  static PhaseGrid centered(std::size_t nx, std::size_t np, double hx, double hp,
                            double cu = 0.0, double cv = 0.0);

  std::size_t size() const { return nx * np; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * np + j; }
  double u(std::size_t i) const { return x0 + static_cast<double>(i) * hx; }
  double v(std::size_t j) const { return p0 + static_cast<double>(j) * hp; }
  double cell_area() const { return hx * hp; }

  // Throws ParameterError for fewer than 5 points per axis or bad spacings.
  void validate() const;

  bool operator==(PhaseGrid const&) const = default;
};

}  // namespace qxpanse
