#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>

// Central finite differences of a scalar function of two variables, built as
// tensor products of one-dimensional stencils. Used as an oracle for the
// variational hierarchy and the inverse-map derivatives.
namespace qxtest {

struct Stencil1 {
  int half = 0;  // offsets -half..half
  std::array<double, 5> w{};
};

inline Stencil1 central(int order) {
  switch (order) {
    case 0: return {0, {1.0}};
    case 1: return {1, {-0.5, 0.0, 0.5}};
    case 2: return {1, {1.0, -2.0, 1.0}};
    default: return {2, {-0.5, 1.0, 0.0, -1.0, 0.5}};
  }
}

// d^{a+b} f / dx^a dp^b at (x, p) with steps hx, hp.
inline double fd_derivative(std::function<double(double, double)> const& f, double x, double p,
                            int a, int b, double hx, double hp) {
  Stencil1 const sx = central(a), sp = central(b);
  double acc = 0.0;
  for (int i = -sx.half; i <= sx.half; ++i) {
    double const wx = sx.w[static_cast<std::size_t>(i + sx.half)];
    if (wx == 0.0) continue;
    for (int j = -sp.half; j <= sp.half; ++j) {
      double const wp = sp.w[static_cast<std::size_t>(j + sp.half)];
      if (wp == 0.0) continue;
      acc += wx * wp * f(x + i * hx, p + j * hp);
    }
  }
  return acc / (std::pow(hx, a) * std::pow(hp, b));
}

}  // namespace qxtest
