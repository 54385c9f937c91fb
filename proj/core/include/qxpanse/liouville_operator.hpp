#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qxpanse/flow.hpp"
#include "qxpanse/inverse_map.hpp"
#include "qxpanse/phase_grid.hpp"
#include "qxpanse/units.hpp"

namespace qxpanse {

// Coefficients of d^{n+m} / dx^n dp^m in the Liouville-frame equation.
struct GCoeffs {
  double g00 = 0.0;
  double g10 = 0.0, g01 = 0.0;
  double g20 = 0.0, g02 = 0.0, g11 = 0.0;
  double g30 = 0.0, g03 = 0.0, g21 = 0.0, g12 = 0.0;

  bool finite() const;
};

GCoeffs g_coefficients(FlowState const& flow, InverseDerivs const& inv,
                       DimensionlessParams const& params);

// Evaluates inverse derivatives and g at every grid point.
std::vector<GCoeffs> g_field(FlowField const& flow, DimensionlessParams const& params,
                             int threads = 1);

// Stencil slots, in storage order.
inline constexpr std::size_t kStencilSize = 13;
inline constexpr std::array<std::array<int, 2>, kStencilSize> kStencilOffsets{{
    {0, 0},
    {1, 0},
    {-1, 0},
    {0, 1},
    {0, -1},
    {1, 1},
    {-1, -1},
    {-1, 1},
    {1, -1},
    {2, 0},
    {-2, 0},
    {0, 2},
    {0, -2},
}};

// Row weights for one grid point given its coefficients and the spacings.
std::array<double, kStencilSize> stencil_weights(GCoeffs const& g, double hx, double hp);

// N x N operator with exactly 13 slots per row (zero padded), periodic wrap.
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(PhaseGrid const& grid);

  std::size_t dim() const { return n_; }
  PhaseGrid const& grid() const { return grid_; }

  std::span<std::uint32_t const> columns(std::size_t row) const {
    return {cols_.data() + row * kStencilSize, kStencilSize};
  }
  std::span<double const> values(std::size_t row) const {
    return {vals_.data() + row * kStencilSize, kStencilSize};
  }
  std::span<double> values(std::size_t row) {
    return {vals_.data() + row * kStencilSize, kStencilSize};
  }

  // Sum of duplicate-column entries; 0 if the column is outside the stencil.
  double entry(std::size_t row, std::size_t col) const;

  std::size_t nnz() const;
  double inf_norm() const { return inf_norm_; }
  double one_norm() const { return one_norm_; }
  // sqrt(||D||_1 ||D||_inf) bounds the spectral norm.
  double two_norm_bound() const { return std::sqrt(inf_norm_ * one_norm_); }
  // Recomputes both norms from the stored values.
  void update_norms();

  // y = D x
  void apply(std::span<double const> x, std::span<double> y, int threads = 1) const;

  // Coordinate text dump: "row col value" per nonzero.
  void write_coordinates(std::ostream& os) const;

 private:
  PhaseGrid grid_;
  std::size_t n_ = 0;
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  double inf_norm_ = 0.0;
  double one_norm_ = 0.0;
};

SparseOperator assemble_operator(PhaseGrid const& grid, std::span<GCoeffs const> g,
                                 int threads = 1);

// Fraction of sum |W| held within `width` cells of the grid edge.
double boundary_mass_fraction(PhaseGrid const& grid, std::span<double const> w,
                              std::size_t width = 2);

inline constexpr double kWrapWarningFraction = 1e-6;

}  // namespace qxpanse
