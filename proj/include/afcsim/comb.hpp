#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "afcsim/rng.hpp"
#include "afcsim/units.hpp"

namespace afcsim {

struct ToothShape {
  enum class Kind { gaussian };  // square teeth can be added without an API change
  Kind kind = Kind::gaussian;
  double fwhm_gamma_hz = 0.0;

  void validate() const {
    if (!(fwhm_gamma_hz > 0.0)) throw std::invalid_argument("ToothShape: fwhm_gamma must be > 0");
  }
};

// A periodic train of Gaussian absorption teeth. Tooth heights are uniform;
// the density is hard-truncated at the bandwidth window plus a 3*gamma guard
// band and renormalized to unit integral.
struct CombSpec {
  double period_delta_hz = 0.0;
  ToothShape tooth;
  double bandwidth_hz = 0.0;
  double center_detuning_hz = 0.0;  // relative to the cavity center
  double weight_plus = 0.5;         // subclass weights, sum to 1
  double weight_minus = 0.5;

  double finesse() const { return period_delta_hz / tooth.fwhm_gamma_hz; }
  int n_teeth() const { return static_cast<int>(std::floor(bandwidth_hz / period_delta_hz)) + 1; }

  void validate() const {
    if (!(period_delta_hz > 0.0)) throw std::invalid_argument("CombSpec: period_delta must be > 0");
    tooth.validate();
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("CombSpec: bandwidth must be > 0");
    if (!(finesse() > 1.0)) throw std::invalid_argument("CombSpec: finesse = delta/gamma must be > 1");
    if (!(bandwidth_hz >= period_delta_hz)) throw std::invalid_argument("CombSpec: bandwidth must be >= period_delta");
    if (weight_plus < 0.0 || weight_minus < 0.0 || std::abs(weight_plus + weight_minus - 1.0) > 1e-12)
      throw std::invalid_argument("CombSpec: subclass weights must be non-negative and sum to 1");
  }

  // CombSpec with the tooth width implied by a target finesse
  static CombSpec from_finesse(double delta_mhz, double finesse, double bandwidth_mhz,
                               double center_mhz = 0.0, double w_plus = 0.5, double w_minus = 0.5) {
    CombSpec s;
    s.period_delta_hz = delta_mhz * 1e6;
    s.tooth.fwhm_gamma_hz = delta_mhz * 1e6 / finesse;
    s.bandwidth_hz = bandwidth_mhz * 1e6;
    s.center_detuning_hz = center_mhz * 1e6;
    s.weight_plus = w_plus;
    s.weight_minus = w_minus;
    s.validate();
    return s;
  }
};

// |f~(k/Delta)| of a unit-area Gaussian tooth: exp(-pi^2 k^2 / (4 ln2 F^2)).
inline double tooth_fourier(int k, double finesse) {
  if (k < 0) throw std::invalid_argument("tooth_fourier: k must be >= 0");
  if (!(finesse > 0.0)) throw std::invalid_argument("tooth_fourier: finesse must be > 0");
  const double x = pi * static_cast<double>(k) / finesse;
  return std::exp(-x * x / (4.0 * ln2));
}

// Normalized spectral density n(omega) of ion transition frequencies
// (omega in rad/s relative to the cavity center, integral = 1).
class SpectralDensity {
 public:
  static SpectralDensity from_comb(const CombSpec& spec) {
    spec.validate();
    SpectralDensity d;
    const int n = spec.n_teeth();
    const double delta_w = hz_to_rad(spec.period_delta_hz);
    const double center = hz_to_rad(spec.center_detuning_hz);
    for (int j = 0; j < n; ++j)
      d.centers_.push_back(center + (j - 0.5 * (n - 1)) * delta_w);
    d.sigma_ = fwhm_to_sigma(hz_to_rad(spec.tooth.fwhm_gamma_hz));
    const double guard = 3.0 * hz_to_rad(spec.tooth.fwhm_gamma_hz);
    d.lo_ = center - 0.5 * hz_to_rad(spec.bandwidth_hz) - guard;
    d.hi_ = center + 0.5 * hz_to_rad(spec.bandwidth_hz) + guard;
    d.wplus_ = spec.weight_plus;
    d.wminus_ = spec.weight_minus;
    d.finish();
    return d;
  }

  // Smooth comb-less inhomogeneous line (a single wide Gaussian)
  static SpectralDensity gaussian_line(double center_hz, double fwhm_hz,
                                       double w_plus = 0.5, double w_minus = 0.5) {
    if (!(fwhm_hz > 0.0)) throw std::invalid_argument("gaussian_line: fwhm must be > 0");
    SpectralDensity d;
    d.centers_.push_back(hz_to_rad(center_hz));
    d.sigma_ = fwhm_to_sigma(hz_to_rad(fwhm_hz));
    d.lo_ = hz_to_rad(center_hz) - 6.0 * hz_to_rad(fwhm_hz);
    d.hi_ = hz_to_rad(center_hz) + 6.0 * hz_to_rad(fwhm_hz);
    d.wplus_ = w_plus;
    d.wminus_ = w_minus;
    d.finish();
    return d;
  }

  double operator()(double omega) const {
    if (omega < lo_ || omega > hi_) return 0.0;
    double s = 0.0;
    for (const double c : centers_) {
      const double z = (omega - c) / sigma_;
      if (std::abs(z) < 40.0) s += std::exp(-0.5 * z * z);
    }
    return s * norm_ / (sigma_ * std::sqrt(two_pi));
  }

  double subclass_density(double omega, int subclass) const {
    return (subclass > 0 ? wplus_ : wminus_) * (*this)(omega);
  }

  double cdf(double omega) const {
    if (omega <= lo_) return 0.0;
    if (omega >= hi_) return 1.0;
    double s = 0.0;
    for (const double c : centers_) s += tooth_mass(c, lo_, omega);
    return s * norm_;
  }

  // inverse CDF by bisection (the CDF is monotone and cheap)
  double quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile: p must be in [0,1]");
    double a = lo_, b = hi_;
    while (b - a > 1e-10 * sigma_) {
      const double mid = 0.5 * (a + b);
      if (cdf(mid) > p) b = mid; else a = mid;
    }
    return 0.5 * (a + b);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double sigma_omega() const { return sigma_; }
  double weight_plus() const { return wplus_; }
  double weight_minus() const { return wminus_; }
  const std::vector<double>& tooth_centers() const { return centers_; }

  // one random draw from the density (tooth mixture + truncation)
  double sample(Rng& rng) const {
    while (true) {
      const std::size_t j = std::min<std::size_t>(centers_.size() - 1,
          static_cast<std::size_t>(rng.uniform() * static_cast<double>(centers_.size())));
      const double x = centers_[j] + sigma_ * rng.gaussian();
      if (x >= lo_ && x <= hi_) return x;
    }
  }

 private:
  void finish() {
    double mass = 0.0;
    for (const double c : centers_) mass += tooth_mass(c, lo_, hi_);
    if (!(mass > 0.0)) throw std::invalid_argument("SpectralDensity: empty window");
    norm_ = 1.0 / mass;
  }

  // integral of one unit-area Gaussian tooth over [a, b]
  double tooth_mass(double c, double a, double b) const {
    const double r = std::sqrt(2.0) * sigma_;
    return 0.5 * (std::erf((b - c) / r) - std::erf((a - c) / r));
  }

  std::vector<double> centers_;  // rad/s
  double sigma_ = 0.0;           // rad/s
  double lo_ = 0.0, hi_ = 0.0;   // truncation window
  double norm_ = 1.0;
  double wplus_ = 0.5, wminus_ = 0.5;
};

struct Resonator {
  double length_um = 100.0;
  double x_eff_um = 6.0;  // optical mode penetration into each mirror
  double effective_length_um() const { return length_um + 2.0 * x_eff_um; }

  void validate() const {
    if (!(length_um > 0.0)) throw std::invalid_argument("Resonator: length must be > 0");
    if (x_eff_um < 0.0) throw std::invalid_argument("Resonator: x_eff must be >= 0");
  }
};

enum class SamplingMode { random, stratified };

// Sampled ion ensemble. The per-ion coupling g satisfies g^2 n = g_total^2,
// so the collective coupling is preserved independently of n.
struct IonEnsemble {
  std::vector<double> detuning0;     // rad/s, zero-field detuning from cavity center
  std::vector<double> position_x_um; // along the resonator, centered at 0
  std::vector<double> subclass;      // +1 or -1
  std::vector<double> s_hz_per_vcm;  // individual Stark parameter
  double g = 0.0;                    // per-ion coupling, rad/s
  std::uint64_t seed = 0;

  std::size_t size() const { return detuning0.size(); }
};

// Draw n ions from a spectral density. Detunings follow the density,
// positions are uniform over the effective resonator length, subclasses
// follow the (w+, w-) weights and the Stark parameter is Gaussian with
// mean s_b and FWHM gamma_s.
//
// stratified mode places detunings, positions and Stark parameters on
// equal-mass quantiles (independently shuffled), which represents the
// density with O(1/n) error instead of O(1/sqrt(n)) sampling noise. When
// the subclasses are balanced, ions are created in +/- pairs sharing all
// other coordinates, so subclass-symmetric observables cancel exactly.
inline IonEnsemble sample_ensemble(const SpectralDensity& density, std::size_t n,
                                   const Resonator& resonator,
                                   double s_b_hz_per_vcm, double gamma_s_hz_per_vcm,
                                   double g_total, std::uint64_t seed,
                                   SamplingMode mode = SamplingMode::random) {
  if (n < 100) throw std::invalid_argument("sample_ensemble: n must be >= 100");
  resonator.validate();
  if (g_total < 0.0) throw std::invalid_argument("sample_ensemble: g_total must be >= 0");
  if (gamma_s_hz_per_vcm < 0.0) throw std::invalid_argument("sample_ensemble: gamma_s must be >= 0");

  IonEnsemble e;
  e.seed = seed;
  e.detuning0.reserve(n);
  e.position_x_um.reserve(n);
  e.subclass.reserve(n);
  e.s_hz_per_vcm.reserve(n);

  Rng rng(seed);
  const double half_span = 0.5 * resonator.effective_length_um();
  const double sigma_s = fwhm_to_sigma(gamma_s_hz_per_vcm);
  const double wplus = density.weight_plus();

  if (mode == SamplingMode::random) {
    for (std::size_t i = 0; i < n; ++i) {
      e.detuning0.push_back(density.sample(rng));
      e.position_x_um.push_back(rng.uniform(-half_span, half_span));
      e.subclass.push_back(rng.uniform() < wplus ? +1.0 : -1.0);
      e.s_hz_per_vcm.push_back(sigma_s > 0.0 ? s_b_hz_per_vcm + sigma_s * rng.gaussian()
                                             : s_b_hz_per_vcm);
    }
  } else {
    const bool paired = std::abs(wplus - 0.5) < 1e-12 && n % 2 == 0;
    const std::size_t m = paired ? n / 2 : n;

    std::vector<double> det(m), pos(m), spar(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
      det[i] = density.quantile(q);
      pos[i] = (q - 0.5) * 2.0 * half_span;
      spar[i] = sigma_s > 0.0 ? s_b_hz_per_vcm + sigma_s * normal_quantile(q) : s_b_hz_per_vcm;
    }
    rng.shuffle(pos);   // decorrelate coordinates from the detuning quantiles
    rng.shuffle(spar);

    if (paired) {
      for (std::size_t i = 0; i < m; ++i) {
        for (const double sub : {+1.0, -1.0}) {
          e.detuning0.push_back(det[i]);
          e.position_x_um.push_back(pos[i]);
          e.subclass.push_back(sub);
          e.s_hz_per_vcm.push_back(spar[i]);
        }
      }
    } else {
      std::vector<double> sub(m, -1.0);
      const std::size_t n_plus = static_cast<std::size_t>(std::llround(wplus * static_cast<double>(m)));
      std::fill(sub.begin(), sub.begin() + std::min(n_plus, m), +1.0);
      rng.shuffle(sub);
      for (std::size_t i = 0; i < m; ++i) {
        e.detuning0.push_back(det[i]);
        e.position_x_um.push_back(pos[i]);
        e.subclass.push_back(sub[i]);
        e.s_hz_per_vcm.push_back(spar[i]);
      }
    }
  }

  e.g = g_total / std::sqrt(static_cast<double>(n));
  return e;
}

inline IonEnsemble sample_ensemble(const CombSpec& spec, std::size_t n, const Resonator& resonator,
                                   double s_b_hz_per_vcm, double gamma_s_hz_per_vcm,
                                   double g_total, std::uint64_t seed,
                                   SamplingMode mode = SamplingMode::random) {
  return sample_ensemble(SpectralDensity::from_comb(spec), n, resonator, s_b_hz_per_vcm,
                         gamma_s_hz_per_vcm, g_total, seed, mode);
}

}  // namespace afcsim
