#pragma once

#include <stdexcept>

namespace afcsim {

// One-sided cavity, field decay convention: the stored field decays as
// exp(-kappa t) and the input couples through the lower-reflectivity
// mirror at rate kappa_in.
struct CavityParams {
  double kappa = 0.0;          // total field decay rate, rad/s
  double kappa_in = 0.0;       // input-mirror decay rate, rad/s
  double delta_omega_a = 0.0;  // cavity detuning, rad/s
  double g_total = 0.0;        // collective ion-cavity coupling, rad/s
  double gamma_h = 1.0 / 108e-6;  // homogeneous decay rate 1/T2, T2 = 108 us

  void validate() const {
    if (!(kappa_in > 0.0) || !(kappa_in <= kappa))
      throw std::invalid_argument("CavityParams: need 0 < kappa_in <= kappa");
    if (g_total < 0.0) throw std::invalid_argument("CavityParams: g_total must be >= 0");
    if (gamma_h < 0.0) throw std::invalid_argument("CavityParams: gamma_h must be >= 0");
  }
};

}  // namespace afcsim
