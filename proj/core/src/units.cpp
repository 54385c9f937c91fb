#include "qxpanse/units.hpp"

#include <cmath>

#include "qxpanse/error.hpp"

namespace qxpanse {

PhysicalParams PhysicalParams::with_thermal_noise(double mass, double omega,
                                                  double gamma, double hbar,
                                                  ThermalInputs const& thermal) {
  PhysicalParams p;
  p.mass = mass;
  p.omega = omega;
  p.gamma = gamma;
  p.hbar = hbar;
  p.noise_rate = gamma * thermal.boltzmann * thermal.temperature / (hbar * omega) +
                 thermal.white_force_rate;
  return p;
}

void PhysicalParams::validate() const {
  if (!(mass > 0.0)) throw ParameterError("mass must be positive");
  if (!(omega > 0.0)) throw ParameterError("reference frequency must be positive");
  if (!(hbar > 0.0)) throw ParameterError("hbar must be positive");
  if (!(gamma >= 0.0)) throw ParameterError("damping rate must be non-negative");
  if (!(noise_rate >= 0.0)) throw ParameterError("noise rate must be non-negative");
}

UnitSystem UnitSystem::from(PhysicalParams const& params) {
  params.validate();
  UnitSystem u;
  u.x_zpf = std::sqrt(params.hbar / (2.0 * params.mass * params.omega));
  u.p_zpf = params.hbar / (2.0 * u.x_zpf);
  u.time_unit = 1.0 / params.omega;
  return u;
}

Potential Potential::quartic(double eta) {
  if (!(eta > 0.0)) throw ParameterError("quartic strength eta must be positive");
  double const eta2 = eta * eta;
  return Potential({0.0, 0.0, 0.0, 1.0 / (4.0 * eta2 * eta2)});
}

double Potential::value(double u) const {
  return u * (c_[0] + u * (c_[1] + u * (c_[2] + u * c_[3])));
}

PotentialDerivs Potential::derivs(double u) const {
  auto const& [c1, c2, c3, c4] = c_;
  PotentialDerivs d;
  d.d1 = c1 + u * (2.0 * c2 + u * (3.0 * c3 + u * 4.0 * c4));
  d.d2 = 2.0 * c2 + u * (6.0 * c3 + u * 12.0 * c4);
  d.d3 = 6.0 * c3 + u * 24.0 * c4;
  d.d4 = 24.0 * c4;
  return d;
}

PotentialDerivs potential_derivs(Potential const& potential, double u) {
  return potential.derivs(u);
}

DimensionlessParams nondimensionalize(PhysicalParams const& params,
                                      Potential const& potential) {
  params.validate();
  DimensionlessParams d;
  d.gamma = params.gamma / params.omega;
  d.noise = params.noise_rate / params.omega;
  d.potential = potential;
  return d;
}

PhysicalParams redimensionalize(DimensionlessParams const& params, double mass,
                                double omega, double hbar) {
  PhysicalParams p;
  p.mass = mass;
  p.omega = omega;
  p.hbar = hbar;
  p.gamma = params.gamma * omega;
  p.noise_rate = params.noise * omega;
  p.validate();
  return p;
}

}  // namespace qxpanse
