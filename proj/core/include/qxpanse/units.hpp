#pragma once

#include <array>
#include <optional>

namespace qxpanse {

// Internal units: u = x / x_zpf, v = p / p_zpf, tau = Omega t. In these units
// the mass is 1 and hbar = 2 x_zpf p_zpf = 2.
inline constexpr double kHbar = 2.0;

struct ThermalInputs {
  double temperature = 0.0;
  double boltzmann = 1.380649e-23;
  double white_force_rate = 0.0;  // Gamma_1
};

struct PhysicalParams {
  double mass = 1.0;
  double omega = 1.0;
  double gamma = 0.0;        // damping rate
  double noise_rate = 0.0;   // displacement noise rate Gamma
  double hbar = 1.0;

  // Gamma = gamma k_B T / (hbar Omega) + Gamma_1.
  static PhysicalParams with_thermal_noise(double mass, double omega, double gamma,
                                           double hbar, ThermalInputs const& thermal);

  void validate() const;
};

struct UnitSystem {
  double x_zpf = 1.0;
  double p_zpf = 1.0;
  double time_unit = 1.0;  // 1 / Omega

  static UnitSystem from(PhysicalParams const& params);
};

struct PotentialDerivs {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double d4 = 0.0;
};

// V(x) = hbar Omega * sum_{k=1..4} c_k (x / x_zpf)^k. Stored as exact
// coefficients so every derivative entering the variational hierarchy is exact.
class Potential {
 public:
  Potential() = default;
  explicit Potential(std::array<double, 4> const& c) : c_(c) {}

  static Potential harmonic() { return Potential({0.0, 0.25, 0.0, 0.0}); }
  static Potential quartic(double eta);
  static Potential free() { return Potential(); }

  std::array<double, 4> const& coefficients() const { return c_; }
  double coefficient(int k) const { return c_[k - 1]; }

  double value(double u) const;
  // Derivatives with respect to u, in units of hbar Omega.
  PotentialDerivs derivs(double u) const;

  bool is_quadratic() const { return c_[2] == 0.0 && c_[3] == 0.0; }

  bool operator==(Potential const&) const = default;

 private:
  std::array<double, 4> c_{};
};

PotentialDerivs potential_derivs(Potential const& potential, double u);

struct DimensionlessParams {
  double gamma = 0.0;   // gamma / Omega
  double noise = 0.0;   // Gamma / Omega
  Potential potential;
  bool quantum = true;  // false: hbar -> 0 in the Moyal term only

  // Derivatives of the internal potential energy 2 * sum c_k u^k, i.e. the
  // forces acting on (u, v) with unit mass.
  PotentialDerivs force_derivs(double u) const {
    PotentialDerivs d = potential.derivs(u);
    return {2.0 * d.d1, 2.0 * d.d2, 2.0 * d.d3, 2.0 * d.d4};
  }

  // hbar^2 Gamma / (2 x_zpf^2) in internal units.
  double diffusion() const { return 0.5 * kHbar * kHbar * noise; }

  // Prefactor of V'''(x) d^3/dp^3 in the Moyal expansion, -hbar^2 / 24.
  double moyal_prefactor() const {
    return quantum ? -kHbar * kHbar / 24.0 : 0.0;
  }
};

DimensionlessParams nondimensionalize(PhysicalParams const& params,
                                      Potential const& potential);

// Inverse of nondimensionalize given the dimensional scales.
PhysicalParams redimensionalize(DimensionlessParams const& params, double mass,
                                double omega, double hbar);

}  // namespace qxpanse
