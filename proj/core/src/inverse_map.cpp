#include "qxpanse/inverse_map.hpp"

#include <cmath>
#include <string>

#include "qxpanse/error.hpp"

namespace qxpanse {

Jacobian2 invert_jacobian(Jacobian2 const& jac, double det_tolerance) {
  double const det = jac.det();
  if (!(std::abs(det - 1.0) < det_tolerance))
    throw SymplecticityError("flow Jacobian determinant " + std::to_string(det) +
                             " deviates from one");
  Jacobian2 ja;
  ja.m = {{{jac(1, 1), -jac(0, 1)}, {-jac(1, 0), jac(0, 0)}}};
  return ja;
}

Hessian2 inverse_hessian(Hessian2 const& hess, Jacobian2 const& ja) {
  // Contract the lower indices first: G^n_jk = sum_lm H^n_lm Ja^l_j Ja^m_k.
  Hessian2 lowered;
  for (int n = 0; n < 2; ++n)
    for (int j = 0; j < 2; ++j)
      for (int k = j; k < 2; ++k) {
        double acc = 0.0;
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m) acc += hess(n, l, m) * ja(l, j) * ja(m, k);
        lowered.set(n, j, k, acc);
      }
  Hessian2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = j; k < 2; ++k)
        out.set(i, j, k, -(ja(i, 0) * lowered(0, j, k) + ja(i, 1) * lowered(1, j, k)));
  return out;
}

Third2 inverse_third(Third2 const& third, Hessian2 const& hess, Hessian2 const& inv_hess,
                     Jacobian2 const& ja) {
  Third2 out;
  for (int i = 0; i < 2; ++i) {
    // Only the sorted index triples (0,0,0), (0,0,1), (0,1,1), (1,1,1).
    for (int ones = 0; ones < 4; ++ones) {
      int const j = ones >= 3 ? 1 : 0;
      int const k = ones >= 2 ? 1 : 0;
      int const a = ones >= 1 ? 1 : 0;
      double acc = 0.0;
      for (int n = 0; n < 2; ++n) {
        double inner = 0.0;
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m) {
            for (int b = 0; b < 2; ++b)
              inner += third(n, l, m, b) * ja(l, j) * ja(m, k) * ja(b, a);
            inner += hess(n, l, m) * (inv_hess(l, j, k) * ja(m, a) +
                                      inv_hess(l, j, a) * ja(m, k) +
                                      inv_hess(l, k, a) * ja(m, j));
          }
        acc += ja(i, n) * inner;
      }
      out.set(i, j, k, a, -acc);
    }
  }
  return out;
}

InverseDerivs extract_p_derivs(Jacobian2 const& ja, Hessian2 const& inv_hess,
                               Third2 const& inv_third) {
  InverseDerivs d;
  d.X1 = ja(0, 1);
  d.P1 = ja(1, 1);
  d.X2 = inv_hess(0, 1, 1);
  d.P2 = inv_hess(1, 1, 1);
  d.X3 = inv_third(0, 1, 1, 1);
  d.P3 = inv_third(1, 1, 1, 1);
  return d;
}

InverseDerivs inverse_derivs(FlowState const& state, double det_tolerance) {
  Jacobian2 const ja = invert_jacobian(Jacobian2::from(state), det_tolerance);
  Hessian2 const hess = Hessian2::from(state);
  Hessian2 const he = inverse_hessian(hess, ja);
  Third2 const te = inverse_third(Third2::from(state), hess, he, ja);
  return extract_p_derivs(ja, he, te);
}

}  // namespace qxpanse
