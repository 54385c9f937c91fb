#include "qxpanse/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qxpanse/error.hpp"
#include "qxpanse/parallel.hpp"

namespace qxpanse {

double Moments::scaled_x_width(double eta) const { return std::sqrt(x2) / eta; }
double Moments::scaled_p_width() const { return std::sqrt(p2); }

namespace {

struct MomentSums {
  double w = 0, x = 0, p = 0, xx = 0, pp = 0, xp = 0;

  void add(double u, double v, double weight) {
    w += weight;
    x += weight * u;
    p += weight * v;
    xx += weight * u * u;
    pp += weight * v * v;
    xp += weight * u * v;
  }

  Moments finish(double area) const {
    if (w == 0.0 || !std::isfinite(w)) throw DegenerateStateError("Wigner field has zero norm");
    Moments m;
    m.norm = w * area;
    m.mean_x = x / w;
    m.mean_p = p / w;
    m.x2 = xx / w;
    m.p2 = pp / w;
    m.xp_sym = 2.0 * xp / w;
    return m;
  }
};

}  // namespace

Moments moments(WignerField const& w, FlowField const& flow) {
  if (w.values.size() != flow.size())
    throw ParameterError("Wigner field and flow field sizes differ");
  MomentSums sums;
  auto const states = flow.states();
  for (std::size_t k = 0; k < states.size(); ++k)
    sums.add(states[k].x, states[k].p, w.values[k]);
  return sums.finish(w.grid.cell_area());
}

Moments grid_moments(WignerField const& w) {
  MomentSums sums;
  for (std::size_t i = 0; i < w.grid.nx; ++i)
    for (std::size_t j = 0; j < w.grid.np; ++j)
      sums.add(w.grid.u(i), w.grid.v(j), w.values[w.grid.index(i, j)]);
  return sums.finish(w.grid.cell_area());
}

std::pair<double, double> singular_values(double a, double b, double c, double d) {
  double const fro2 = a * a + b * b + c * c + d * d;
  double const det = std::abs(a * d - b * c);
  double const disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
  double const smax = std::sqrt(0.5 * (fro2 + disc));
  double const smin = smax > 0.0 ? det / smax : 0.0;
  return {smax, smin};
}

GridDensity grid_density(FlowField const& flow) {
  GridDensity gd;
  auto const states = flow.states();
  gd.lambda_plus.resize(states.size());
  gd.lambda_minus.resize(states.size());
  gd.lambda_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < states.size(); ++k) {
    auto const& s = states[k];
    auto const [hi, lo] = singular_values(s.x_x, s.x_p, s.p_x, s.p_p);
    gd.lambda_plus[k] = hi;
    gd.lambda_minus[k] = lo;
    if (lo < gd.lambda_min) {
      gd.lambda_min = lo;
      gd.argmin = k;
    }
  }
  return gd;
}

double interpolate_bilinear(WignerField const& w, double u, double v) {
  PhaseGrid const& g = w.grid;
  double const fi = (u - g.x0) / g.hx;
  double const fj = (v - g.p0) / g.hp;
  if (!(fi >= 0.0) || !(fj >= 0.0)) return 0.0;
  auto const i = static_cast<std::size_t>(fi);
  auto const j = static_cast<std::size_t>(fj);
  if (i + 1 >= g.nx || j + 1 >= g.np) {
    // Exactly on the last row or column.
    if (i + 1 == g.nx && fi == static_cast<double>(i) && j < g.np && fj == static_cast<double>(j))
      return w.values[g.index(i, j)];
    return 0.0;
  }
  double const a = fi - static_cast<double>(i);
  double const b = fj - static_cast<double>(j);
  double const w00 = w.values[g.index(i, j)];
  double const w10 = w.values[g.index(i + 1, j)];
  double const w01 = w.values[g.index(i, j + 1)];
  double const w11 = w.values[g.index(i + 1, j + 1)];
  return (1.0 - a) * ((1.0 - b) * w00 + b * w01) + a * ((1.0 - b) * w10 + b * w11);
}

ResampleResult resample_lab_frame(WignerField const& w, DimensionlessParams const& params,
                                  std::size_t n_steps, PhaseGrid const& target, int threads) {
  target.validate();
  std::vector<double> us(target.size()), vs(target.size());
  for (std::size_t i = 0; i < target.nx; ++i)
    for (std::size_t j = 0; j < target.np; ++j) {
      us[target.index(i, j)] = target.u(i);
      vs[target.index(i, j)] = target.v(j);
    }
  ResampleResult out;
  out.diverged = backward_points(us, vs, params, w.time, n_steps, threads);
  out.field.grid = target;
  out.field.time = w.time;
  out.field.values.resize(target.size());
  PhaseGrid const& src = w.grid;
  double const u_hi = src.u(src.nx - 1), v_hi = src.v(src.np - 1);
  for (std::size_t k = 0; k < target.size(); ++k) {
    double const u = us[k], v = vs[k];
    if (!std::isfinite(u)) {
      out.field.values[k] = 0.0;
      continue;
    }
    if (u < src.x0 || u > u_hi || v < src.p0 || v > v_hi) ++out.outside;
    out.field.values[k] = interpolate_bilinear(w, u, v);
  }
  return out;
}

Marginal position_marginal(WignerField const& lab) {
  PhaseGrid const& g = lab.grid;
  Marginal m;
  m.x.resize(g.nx);
  m.p.resize(g.nx);
  for (std::size_t i = 0; i < g.nx; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.np; ++j) acc += lab.values[g.index(i, j)];
    acc -= 0.5 * (lab.values[g.index(i, 0)] + lab.values[g.index(i, g.np - 1)]);
    m.x[i] = g.u(i);
    m.p[i] = acc * g.hp;
  }
  return m;
}

namespace {

// Vertex of the parabola through three equally spaced samples.
std::pair<double, double> parabola_vertex(double left, double mid, double right) {
  double const curvature = left - 2.0 * mid + right;
  if (curvature == 0.0) return {0.0, mid};
  double const offset = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
  return {offset, mid - 0.25 * (left - right) * offset};
}

}  // namespace

std::vector<Peak> find_peaks(std::span<double const> x, std::span<double const> p,
                             double noise_floor) {
  if (x.size() != p.size()) throw ParameterError("marginal coordinate/value sizes differ");
  std::vector<Peak> peaks;
  if (p.size() < 3) return peaks;
  double const top = *std::max_element(p.begin(), p.end());
  double const floor = noise_floor * top;
  double const h = x[1] - x[0];
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i] > p[i - 1] && p[i] >= p[i + 1] && p[i] > floor) {
      auto const [offset, value] = parabola_vertex(p[i - 1], p[i], p[i + 1]);
      peaks.push_back({x[i] + offset * h, value, i});
    }
  }
  return peaks;
}

InterferenceMetrics interference_metrics(std::span<double const> x, std::span<double const> p,
                                         double noise_floor) {
  InterferenceMetrics out;
  out.peaks = find_peaks(x, p, noise_floor);
  if (out.peaks.size() < 2)
    throw NoInterferenceError("fewer than two peaks in the position marginal");

  // Global maximum; ties go to smaller |x|, then to negative x.
  auto better = [](Peak const& a, Peak const& b) {
    double const scale = std::max(std::abs(a.value), std::abs(b.value));
    if (std::abs(a.value - b.value) > 1e-12 * scale) return a.value > b.value;
    if (std::abs(a.x) != std::abs(b.x)) return std::abs(a.x) < std::abs(b.x);
    return a.x < b.x;
  };
  Peak main = out.peaks.front();
  for (auto const& pk : out.peaks)
    if (better(pk, main)) main = pk;

  Peak const* neighbor = nullptr;
  for (auto const& pk : out.peaks) {
    if (pk.index == main.index) continue;
    if (!neighbor || std::abs(pk.x - main.x) < std::abs(neighbor->x - main.x)) neighbor = &pk;
  }
  out.main_peak = main;
  out.neighbor_peak = *neighbor;
  out.fringe_spacing = std::abs(neighbor->x - main.x);

  std::size_t const lo = std::min(main.index, neighbor->index);
  std::size_t const hi = std::max(main.index, neighbor->index);
  std::size_t arg = lo;
  for (std::size_t i = lo; i <= hi; ++i)
    if (p[i] < p[arg]) arg = i;
  double valley = p[arg];
  if (arg > 0 && arg + 1 < p.size()) valley = parabola_vertex(p[arg - 1], p[arg], p[arg + 1]).second;
  out.valley = valley;
  out.visibility = (main.value - valley) / (main.value + valley);
  return out;
}

}  // namespace qxpanse
