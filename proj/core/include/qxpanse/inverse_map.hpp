#pragma once

#include <array>

#include "qxpanse/flow.hpp"

namespace qxpanse {

// Index convention: component 0 is position, 1 is momentum. J(i, j) is the
// derivative of output i with respect to input j.
struct Jacobian2 {
  std::array<std::array<double, 2>, 2> m{{{1.0, 0.0}, {0.0, 1.0}}};

  double operator()(int i, int j) const { return m[i][j]; }
  double& operator()(int i, int j) { return m[i][j]; }
  double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

  static Jacobian2 from(FlowState const& s) {
    Jacobian2 j;
    j.m = {{{s.x_x, s.x_p}, {s.p_x, s.p_p}}};
    return j;
  }
};

// H(i, j, k), symmetric in (j, k); three independent entries per component.
struct Hessian2 {
  // [i][0] = (0,0), [i][1] = (0,1), [i][2] = (1,1)
  std::array<std::array<double, 3>, 2> c{};

  double operator()(int i, int j, int k) const { return c[i][j + k]; }
  void set(int i, int j, int k, double value) { c[i][j + k] = value; }

  static Hessian2 from(FlowState const& s) {
    Hessian2 h;
    h.c = {{{s.x_xx, s.x_xp, s.x_pp}, {s.p_xx, s.p_xp, s.p_pp}}};
    return h;
  }
};

// T(i, j, k, a), fully symmetric in (j, k, a); entry index = number of momentum
// indices among the three.
struct Third2 {
  std::array<std::array<double, 4>, 2> c{};

  double operator()(int i, int j, int k, int a) const { return c[i][j + k + a]; }
  void set(int i, int j, int k, int a, double value) { c[i][j + k + a] = value; }

  static Third2 from(FlowState const& s) {
    Third2 t;
    t.c = {{{s.x_xxx, s.x_xxp, s.x_xpp, s.x_ppp}, {s.p_xxx, s.p_xxp, s.p_xpp, s.p_ppp}}};
    return t;
  }
};

// Momentum derivatives of the backward map evaluated along the forward
// trajectory: X1 = dX/dp, P1 = dP/dp, and so on up to third order.
struct InverseDerivs {
  double X1 = 0.0, P1 = 1.0;
  double X2 = 0.0, P2 = 0.0;
  double X3 = 0.0, P3 = 0.0;
};

// Closed-form inverse assuming unit determinant. Throws SymplecticityError if
// |det J - 1| >= tolerance.
Jacobian2 invert_jacobian(Jacobian2 const& jac, double det_tolerance = 1e-6);

// He^i_jk = - sum H^n_lm Ja^i_n Ja^l_j Ja^m_k
Hessian2 inverse_hessian(Hessian2 const& hess, Jacobian2 const& ja);

// Te^i_jka = - sum T^n_lmb Ja^i_n Ja^l_j Ja^m_k Ja^b_a
//            - sum H^n_lm Ja^i_n (He^l_jk Ja^m_a + He^l_ja Ja^m_k + He^l_ka Ja^m_j)
Third2 inverse_third(Third2 const& third, Hessian2 const& hess, Hessian2 const& inv_hess,
                     Jacobian2 const& ja);

InverseDerivs extract_p_derivs(Jacobian2 const& ja, Hessian2 const& inv_hess,
                               Third2 const& inv_third);

// Full pipeline for one flow state.
InverseDerivs inverse_derivs(FlowState const& state, double det_tolerance = 1e-6);

}  // namespace qxpanse
