#pragma once

#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <vector>

#include "afcsim/comb.hpp"
#include "afcsim/units.hpp"

// Closed-form theory of the cavity-coupled comb after adiabatic elimination
// of the cavity mode: each rephasing at t = m/Delta re-emits a fraction of
// the stored field, and every earlier emission is partially reabsorbed and
// feeds the later ones. The recursion below reproduces that bookkeeping
// with complex amplitudes relative to E_in = 1.

namespace afcsim {

struct AnalyticParams {
  double kappa = 0.0;       // total cavity field decay rate, rad/s
  double kappa_in = 0.0;    // input-mirror decay rate, rad/s
  double gamma_comb = 0.0;  // effective comb absorption rate, rad/s
  double finesse = 0.0;     // comb finesse Delta/gamma
  double gamma_h = 0.0;     // homogeneous decay rate, 1/s
  double delta_hz = 0.0;    // comb period, Hz

  void validate() const {
    if (!(kappa > 0.0) || !(kappa_in > 0.0) || kappa_in > kappa)
      throw std::invalid_argument("AnalyticParams: need 0 < kappa_in <= kappa");
    if (gamma_comb < 0.0) throw std::invalid_argument("AnalyticParams: gamma_comb must be >= 0");
    if (!(finesse > 1.0)) throw std::invalid_argument("AnalyticParams: finesse must be > 1");
    if (gamma_h < 0.0) throw std::invalid_argument("AnalyticParams: gamma_h must be >= 0");
    if (!(delta_hz > 0.0)) throw std::invalid_argument("AnalyticParams: delta must be > 0");
  }
};

// exp(-pi^2 m^2 / (2 ln2 F^2)), the square of tooth_fourier(m, F)
inline double dephasing_factor(int m, double finesse) {
  if (m < 0) throw std::invalid_argument("dephasing_factor: m must be >= 0");
  const double x = pi * static_cast<double>(m) / finesse;
  return std::exp(-x * x / (2.0 * ln2));
}

// Emission amplitudes E_out(m/Delta) for m = 1..m_max, relative to the
// input amplitude. Emissions with index in `suppressed` are forced to zero,
// modeling intervals dephased by a pi pulse pair; the stored excitation
// still feeds later emissions through the direct input term.
inline std::vector<std::complex<double>> emission_amplitudes(const AnalyticParams& p, int m_max,
                                                             const std::set<int>& suppressed = {}) {
  p.validate();
  if (m_max < 1) throw std::invalid_argument("emission_amplitudes: m_max must be >= 1");

  const double q = 2.0 * p.gamma_comb / (p.kappa + p.gamma_comb);
  const double input_coupling = 2.0 * p.kappa_in / (p.kappa + p.gamma_comb);
  const double bin_time = 1.0 / p.delta_hz;

  std::vector<std::complex<double>> out(static_cast<std::size_t>(m_max));
  for (int m = 1; m <= m_max; ++m) {
    if (suppressed.count(m)) {
      out[static_cast<std::size_t>(m - 1)] = 0.0;
      continue;
    }
    std::complex<double> acc =
        std::exp(-p.gamma_h * m * bin_time) * tooth_fourier(m, p.finesse) * input_coupling;
    for (int k = 1; k < m; ++k)
      acc += std::exp(-p.gamma_h * k * bin_time) * tooth_fourier(k, p.finesse) *
             out[static_cast<std::size_t>(m - k - 1)];
    out[static_cast<std::size_t>(m - 1)] = -q * acc;
  }
  return out;
}

// Efficiency of the m-th emission when emissions 1..m-1 are suppressed:
// eta = (kappa_in/kappa * 4 (G/k) / (1 + G/k)^2)^2 * exp(-pi^2 m^2 / (2 ln2 F^2)).
inline double suppressed_efficiency(const AnalyticParams& p, int m) {
  p.validate();
  if (m < 1) throw std::invalid_argument("suppressed_efficiency: m must be >= 1");
  const double ratio = p.gamma_comb / p.kappa;
  const double prefactor = (p.kappa_in / p.kappa) * 4.0 * ratio / ((1.0 + ratio) * (1.0 + ratio));
  return prefactor * prefactor * dephasing_factor(m, p.finesse);
}

}  // namespace afcsim
