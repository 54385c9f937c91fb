#include "qxpanse/phase_grid.hpp"

#include <cmath>

#include "qxpanse/error.hpp"

namespace qxpanse {

PhaseGrid PhaseGrid::centered(std::size_t nx, std::size_t np, double hx, double hp,
                              double cu, double cv) {
  PhaseGrid g;
  g.nx = nx;
  g.np = np;
  g.hx = hx;
  g.hp = hp;
  g.x0 = cu - 0.5 * static_cast<double>(nx - 1) * hx;
  g.p0 = cv - 0.5 * static_cast<double>(np - 1) * hp;
  g.validate();
  return g;
}

void PhaseGrid::validate() const {
  // The +-2 stencil offsets must be distinct after periodic wrap.
  if (nx < 5 || np < 5) throw ParameterError("phase grid needs at least 5 points per axis");
  if (!(hx > 0.0) || !(hp > 0.0) || !std::isfinite(hx) || !std::isfinite(hp))
    throw ParameterError("grid spacings must be positive and finite");
  if (!std::isfinite(x0) || !std::isfinite(p0))
    throw ParameterError("grid origin must be finite");
}

}  // namespace qxpanse
