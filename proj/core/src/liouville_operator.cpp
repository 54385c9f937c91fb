#include "qxpanse/liouville_operator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "qxpanse/error.hpp"
#include "qxpanse/parallel.hpp"

namespace qxpanse {

bool GCoeffs::finite() const {
  double const all[] = {g00, g10, g01, g20, g02, g11, g30, g03, g21, g12};
  return std::all_of(std::begin(all), std::end(all),
                     [](double a) { return std::isfinite(a); });
}

GCoeffs g_coefficients(FlowState const& flow, InverseDerivs const& inv,
                       DimensionlessParams const& params) {
  double const gamma = params.gamma;
  double const diff = params.diffusion();
  double const q = params.moyal_prefactor() * params.force_derivs(flow.x).d3;
  auto const& [X1, P1, X2, P2, X3, P3] = inv;

  GCoeffs g;
  g.g00 = gamma;
  g.g10 = gamma * flow.p * X1 + diff * X2 + q * X3;
  g.g01 = gamma * flow.p * P1 + diff * P2 + q * P3;
  g.g20 = diff * X1 * X1 + 3.0 * q * X1 * X2;
  g.g02 = diff * P1 * P1 + 3.0 * q * P1 * P2;
  g.g11 = 2.0 * diff * X1 * P1 + 3.0 * q * (X1 * P2 + P1 * X2);
  g.g30 = q * X1 * X1 * X1;
  g.g03 = q * P1 * P1 * P1;
  g.g21 = 3.0 * q * X1 * X1 * P1;
  g.g12 = 3.0 * q * X1 * P1 * P1;
  return g;
}

std::vector<GCoeffs> g_field(FlowField const& flow, DimensionlessParams const& params,
                             int threads) {
  std::vector<GCoeffs> out(flow.size());
  auto const states = flow.states();
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      out[k] = g_coefficients(states[k], inverse_derivs(states[k]), params);
  });
  return out;
}

std::array<double, kStencilSize> stencil_weights(GCoeffs const& g, double hx, double hp) {
  double const ax = 1.0 / hx, ap = 1.0 / hp;
  double const ax2 = ax * ax, ap2 = ap * ap;
  double const ax3 = ax2 * ax, ap3 = ap2 * ap;
  double const xxp = ax2 * ap, xpp = ax * ap2;

  std::array<double, kStencilSize> w{};
  w[0] = g.g00 - 2.0 * g.g20 * ax2 - 2.0 * g.g02 * ap2;
  w[1] = 0.5 * g.g10 * ax + g.g20 * ax2 - g.g30 * ax3 - g.g12 * xpp;   // (+1, 0)
  w[2] = -0.5 * g.g10 * ax + g.g20 * ax2 + g.g30 * ax3 + g.g12 * xpp;  // (-1, 0)
  w[3] = 0.5 * g.g01 * ap + g.g02 * ap2 - g.g03 * ap3 - g.g21 * xxp;   // (0, +1)
  w[4] = -0.5 * g.g01 * ap + g.g02 * ap2 + g.g03 * ap3 + g.g21 * xxp;  // (0, -1)
  double const mixed = 0.25 * g.g11 * ax * ap;
  w[5] = mixed + 0.5 * g.g21 * xxp + 0.5 * g.g12 * xpp;   // (+1, +1)
  w[6] = mixed - 0.5 * g.g21 * xxp - 0.5 * g.g12 * xpp;   // (-1, -1)
  w[7] = -mixed + 0.5 * g.g21 * xxp - 0.5 * g.g12 * xpp;  // (-1, +1)
  w[8] = -mixed - 0.5 * g.g21 * xxp + 0.5 * g.g12 * xpp;  // (+1, -1)
  w[9] = 0.5 * g.g30 * ax3;    // (+2, 0)
  w[10] = -0.5 * g.g30 * ax3;  // (-2, 0)
  w[11] = 0.5 * g.g03 * ap3;   // (0, +2)
  w[12] = -0.5 * g.g03 * ap3;  // (0, -2)
  return w;
}

SparseOperator::SparseOperator(PhaseGrid const& grid)
    : grid_(grid), n_(grid.size()), cols_(n_ * kStencilSize), vals_(n_ * kStencilSize, 0.0) {
  grid_.validate();
  if (n_ > std::numeric_limits<std::uint32_t>::max())
    throw ParameterError("grid too large for 32-bit column indices");
  auto const nx = static_cast<std::ptrdiff_t>(grid.nx);
  auto const np = static_cast<std::ptrdiff_t>(grid.np);
  for (std::ptrdiff_t i = 0; i < nx; ++i)
    for (std::ptrdiff_t j = 0; j < np; ++j) {
      std::size_t const row = static_cast<std::size_t>(i * np + j);
      for (std::size_t s = 0; s < kStencilSize; ++s) {
        std::ptrdiff_t const ii = ((i + kStencilOffsets[s][0]) % nx + nx) % nx;
        std::ptrdiff_t const jj = ((j + kStencilOffsets[s][1]) % np + np) % np;
        cols_[row * kStencilSize + s] = static_cast<std::uint32_t>(ii * np + jj);
      }
    }
}

double SparseOperator::entry(std::size_t row, std::size_t col) const {
  double acc = 0.0;
  auto const c = columns(row);
  auto const v = values(row);
  for (std::size_t s = 0; s < kStencilSize; ++s)
    if (c[s] == col) acc += v[s];
  return acc;
}

void SparseOperator::update_norms() {
  std::vector<double> col_sums(n_, 0.0);
  inf_norm_ = 0.0;
  for (std::size_t r = 0; r < n_; ++r) {
    double row = 0.0;
    for (std::size_t s = 0; s < kStencilSize; ++s) {
      double const a = std::abs(vals_[r * kStencilSize + s]);
      row += a;
      col_sums[cols_[r * kStencilSize + s]] += a;
    }
    inf_norm_ = std::max(inf_norm_, row);
  }
  one_norm_ = col_sums.empty() ? 0.0 : *std::max_element(col_sums.begin(), col_sums.end());
}

std::size_t SparseOperator::nnz() const {
  return static_cast<std::size_t>(
      std::count_if(vals_.begin(), vals_.end(), [](double v) { return v != 0.0; }));
}

void SparseOperator::apply(std::span<double const> x, std::span<double> y,
                           int threads) const {
  if (x.size() != n_ || y.size() != n_)
    throw ParameterError("operator dimension does not match vector length");
  double const* __restrict xs = x.data();
  double* __restrict ys = y.data();
  std::uint32_t const* __restrict cs = cols_.data();
  double const* __restrict vs = vals_.data();
  parallel_for(n_, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      std::uint32_t const* c = cs + r * kStencilSize;
      double const* v = vs + r * kStencilSize;
      double acc = 0.0;
      for (std::size_t s = 0; s < kStencilSize; ++s) acc += v[s] * xs[c[s]];
      ys[r] = acc;
    }
  });
}

void SparseOperator::write_coordinates(std::ostream& os) const {
  auto const old_precision = os.precision(17);
  for (std::size_t r = 0; r < n_; ++r) {
    auto const c = columns(r);
    auto const v = values(r);
    for (std::size_t s = 0; s < kStencilSize; ++s)
      if (v[s] != 0.0) os << r << ' ' << c[s] << ' ' << v[s] << '\n';
  }
  os.precision(old_precision);
}

SparseOperator assemble_operator(PhaseGrid const& grid, std::span<GCoeffs const> g,
                                 int threads) {
  if (g.size() != grid.size())
    throw AssemblyError("coefficient field size does not match grid");
  SparseOperator op(grid);
  std::atomic<std::size_t> bad{std::numeric_limits<std::size_t>::max()};
  parallel_for(grid.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      if (!g[k].finite()) {
        std::size_t expected = bad.load();
        while (k < expected && !bad.compare_exchange_weak(expected, k)) {
        }
        continue;
      }
      auto const w = stencil_weights(g[k], grid.hx, grid.hp);
      auto vals = op.values(k);
      std::copy(w.begin(), w.end(), vals.begin());
    }
  });
  if (std::size_t const k = bad.load(); k != std::numeric_limits<std::size_t>::max())
    throw AssemblyError("non-finite g coefficient at grid index " + std::to_string(k) +
                        " (i=" + std::to_string(k / grid.np) +
                        ", j=" + std::to_string(k % grid.np) + ")");
  op.update_norms();
  return op;
}

double boundary_mass_fraction(PhaseGrid const& grid, std::span<double const> w,
                              std::size_t width) {
  double total = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < grid.nx; ++i)
    for (std::size_t j = 0; j < grid.np; ++j) {
      double const a = std::abs(w[grid.index(i, j)]);
      total += a;
      bool const near = i < width || j < width || i + width >= grid.nx ||
                        j + width >= grid.np;
      if (near) edge += a;
    }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace qxpanse
