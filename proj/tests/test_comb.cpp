#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include "afcsim/comb.hpp"

using namespace afcsim;
using Catch::Approx;

namespace {

// adaptive Simpson quadrature, used as an independent integration oracle
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

CombSpec paper_comb() { return CombSpec::from_finesse(19.7, 12.2, 100.0); }

}  // namespace

TEST_CASE("tooth_fourier trivial and derived values") {
  CHECK(tooth_fourier(0, 12.2) == 1.0);
  CHECK(tooth_fourier(0, 3.0) == 1.0);
  // direct evaluation of exp(-pi^2 k^2 / (4 ln2 F^2))
  CHECK(tooth_fourier(1, 12.2) == Approx(0.97637).margin(1e-5));
  CHECK(tooth_fourier(4, 12.2) == Approx(0.6820).margin(1e-4));
}

TEST_CASE("tooth_fourier equals the Fourier transform of a unit-area Gaussian tooth") {
  // |integral f(w) exp(-i w t) dw| at t = k/Delta for a tooth of FWHM Delta/F
  const double delta_hz = 19.7e6;
  const double finesse = 12.2;
  const double sigma = fwhm_to_sigma(hz_to_rad(delta_hz / finesse));
  for (int k : {1, 2, 4}) {
    const double t = k / delta_hz;
    const auto re = [&](double w) {
      return std::exp(-0.5 * w * w / (sigma * sigma)) / (sigma * std::sqrt(two_pi)) * std::cos(w * t);
    };
    const auto im = [&](double w) {
      return std::exp(-0.5 * w * w / (sigma * sigma)) / (sigma * std::sqrt(two_pi)) * std::sin(w * t);
    };
    const double span = 10.0 * sigma;
    const std::complex<double> ft(integrate(re, -span, span), integrate(im, -span, span));
    CHECK(tooth_fourier(k, finesse) == Approx(std::abs(ft)).epsilon(1e-7));
  }
}

TEST_CASE("tooth_fourier is strictly decreasing in k and in 1/F") {
  for (double f : {2.0, 5.0, 12.2, 40.0}) {
    for (int k = 0; k < 8; ++k) CHECK(tooth_fourier(k + 1, f) < tooth_fourier(k, f));
  }
  for (int k : {1, 3, 6}) {
    double prev = 0.0;
    for (double f : {2.0, 4.0, 8.0, 16.0, 32.0}) {
      CHECK(tooth_fourier(k, f) > prev);
      prev = tooth_fourier(k, f);
    }
  }
}

TEST_CASE("comb density has the right tooth count") {
  CHECK(paper_comb().n_teeth() == 6);                                    // ~6 teeth over 100 MHz
  CHECK(CombSpec::from_finesse(5.0, 10.0, 145.0).n_teeth() == 30);       // 145 MHz / 5 MHz
}

TEST_CASE("comb density is normalized, non-negative, periodic and truncated") {
  const CombSpec spec = paper_comb();
  const SpectralDensity d = SpectralDensity::from_comb(spec);

  const double total = integrate([&](double w) { return d(w); }, d.lo(), d.hi(), 1e-12);
  CHECK(total == Approx(1.0).margin(1e-6));

  const double delta_w = hz_to_rad(spec.period_delta_hz);
  for (double w = -1.5 * delta_w; w < 1.5 * delta_w; w += delta_w / 7.0) {
    CHECK(d(w) >= 0.0);
    CHECK(d(w + delta_w) == Approx(d(w)).margin(1e-12 + 1e-9 * d(w)));  // interior periodicity
  }

  const double guard = 3.0 * hz_to_rad(spec.tooth.fwhm_gamma_hz);
  const double edge = hz_to_rad(0.5 * spec.bandwidth_hz) + guard;
  CHECK(d(edge + 1.0) == 0.0);
  CHECK(d(-edge - 1.0) == 0.0);
}

TEST_CASE("comb density shows six distinct peaks for the six-tooth comb") {
  const SpectralDensity d = SpectralDensity::from_comb(paper_comb());
  int peaks = 0;
  const double step = hz_to_rad(0.05e6);
  double prev2 = d(d.lo()), prev1 = d(d.lo() + step);
  for (double w = d.lo() + 2.0 * step; w <= d.hi(); w += step) {
    const double cur = d(w);
    if (prev1 > prev2 && prev1 > cur && prev1 > 1e-3 * d(0.0)) ++peaks;
    prev2 = prev1;
    prev1 = cur;
  }
  CHECK(peaks == 6);
}

TEST_CASE("zero subclass weight removes that subclass") {
  CombSpec spec = paper_comb();
  spec.weight_plus = 1.0;
  spec.weight_minus = 0.0;
  const SpectralDensity d = SpectralDensity::from_comb(spec);
  CHECK(d.subclass_density(0.0, -1) == 0.0);
  CHECK(d.subclass_density(hz_to_rad(9.85e6), +1) > 0.0);
  const IonEnsemble e = sample_ensemble(spec, 500, Resonator{}, 11.8e3, 0.0, 1e8, 7);
  for (double s : e.subclass) CHECK(s == +1.0);
}

TEST_CASE("comb spec validation rejects bad parameters") {
  CombSpec bad = paper_comb();
  bad.period_delta_hz = 0.0;
  CHECK_THROWS_AS(SpectralDensity::from_comb(bad), std::invalid_argument);
  bad = paper_comb();
  bad.tooth.fwhm_gamma_hz = -1.0;
  CHECK_THROWS_AS(SpectralDensity::from_comb(bad), std::invalid_argument);
  bad = paper_comb();
  bad.bandwidth_hz = 0.0;
  CHECK_THROWS_AS(SpectralDensity::from_comb(bad), std::invalid_argument);
  bad = paper_comb();
  bad.bandwidth_hz = 0.5 * bad.period_delta_hz;  // below one period
  CHECK_THROWS_AS(SpectralDensity::from_comb(bad), std::invalid_argument);
  bad = paper_comb();
  bad.tooth.fwhm_gamma_hz = 2.0 * bad.period_delta_hz;  // finesse < 1
  CHECK_THROWS_AS(SpectralDensity::from_comb(bad), std::invalid_argument);
  bad = paper_comb();
  bad.weight_plus = 0.7;  // weights no longer sum to 1
  CHECK_THROWS_AS(SpectralDensity::from_comb(bad), std::invalid_argument);
}

TEST_CASE("ensemble positions span the effective resonator length") {
  const Resonator res{100.0, 6.0};
  CHECK(res.effective_length_um() == Approx(112.0));
  const IonEnsemble e = sample_ensemble(paper_comb(), 20000, res, 11.8e3, 0.0, 1e8, 11);
  const auto [mn, mx] = std::minmax_element(e.position_x_um.begin(), e.position_x_um.end());
  CHECK(*mn >= -56.0);
  CHECK(*mx <= 56.0);
  CHECK(*mn < -54.0);  // fills the span
  CHECK(*mx > 54.0);
}

TEST_CASE("gamma_s = 0 gives every ion exactly s_b") {
  const IonEnsemble e = sample_ensemble(paper_comb(), 500, Resonator{}, 11.8e3, 0.0, 1e8, 3);
  for (double s : e.s_hz_per_vcm) CHECK(s == 11.8e3);
}

TEST_CASE("same seed reproduces the ensemble bit for bit") {
  for (SamplingMode mode : {SamplingMode::random, SamplingMode::stratified}) {
    const IonEnsemble a = sample_ensemble(paper_comb(), 1000, Resonator{}, 11.8e3, 2.5e3, 1e8, 42, mode);
    const IonEnsemble b = sample_ensemble(paper_comb(), 1000, Resonator{}, 11.8e3, 2.5e3, 1e8, 42, mode);
    CHECK(a.detuning0 == b.detuning0);
    CHECK(a.position_x_um == b.position_x_um);
    CHECK(a.subclass == b.subclass);
    CHECK(a.s_hz_per_vcm == b.s_hz_per_vcm);
  }
}

TEST_CASE("per-ion coupling satisfies g^2 n = g_total^2") {
  const double g_total = 2.0 * pi * 0.6e9;
  const IonEnsemble e = sample_ensemble(paper_comb(), 12345, Resonator{}, 11.8e3, 0.0, g_total, 1);
  CHECK(e.g * e.g * static_cast<double>(e.size()) == Approx(g_total * g_total).epsilon(1e-12));
}

TEST_CASE("ensembles below 100 ions are rejected") {
  CHECK_THROWS_AS(sample_ensemble(paper_comb(), 99, Resonator{}, 11.8e3, 0.0, 1e8, 1),
                  std::invalid_argument);
}

TEST_CASE("sampled detunings follow the comb density (KS test at n = 1e5)") {
  const std::size_t n = 100000;
  const SpectralDensity d = SpectralDensity::from_comb(paper_comb());
  IonEnsemble e = sample_ensemble(d, n, Resonator{}, 11.8e3, 0.0, 1e8, 2024);

  // independent CDF oracle: quadrature of the density on a fine grid
  const int grid_n = 4000;
  std::vector<double> grid(grid_n + 1), cdf(grid_n + 1, 0.0);
  for (int i = 0; i <= grid_n; ++i) grid[i] = d.lo() + (d.hi() - d.lo()) * i / grid_n;
  for (int i = 1; i <= grid_n; ++i)
    cdf[i] = cdf[i - 1] + integrate([&](double w) { return d(w); }, grid[i - 1], grid[i], 1e-12);
  for (auto& c : cdf) c /= cdf.back();

  std::sort(e.detuning0.begin(), e.detuning0.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = e.detuning0[i];
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t j = std::min<std::size_t>(grid.size() - 1, it - grid.begin());
    const double t = (x - grid[j - 1]) / (grid[j] - grid[j - 1]);
    const double f = cdf[j - 1] + t * (cdf[j] - cdf[j - 1]);
    ks = std::max(ks, std::abs(f - (i + 0.5) / static_cast<double>(n)));
  }
  const double critical = 1.628 / std::sqrt(static_cast<double>(n));  // alpha = 0.01
  CHECK(ks < critical);
}

TEST_CASE("ensemble mean Stark parameter converges to s_b") {
  const std::size_t n = 100000;
  const double s_b = 11.8e3, gamma_s = 2.5e3;
  const IonEnsemble e = sample_ensemble(paper_comb(), n, Resonator{}, s_b, gamma_s, 1e8, 5);
  const double mean = std::accumulate(e.s_hz_per_vcm.begin(), e.s_hz_per_vcm.end(), 0.0) / n;
  const double se = fwhm_to_sigma(gamma_s) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - s_b) < 3.0 * se);
}

TEST_CASE("stratified sampling is density-faithful and pairs the subclasses") {
  const std::size_t n = 10000;
  const SpectralDensity d = SpectralDensity::from_comb(paper_comb());
  const IonEnsemble e = sample_ensemble(d, n, Resonator{}, 11.8e3, 2.5e3, 1e8, 9,
                                        SamplingMode::stratified);
  double sum_sub = 0.0;
  for (std::size_t i = 0; i < n; i += 2) {
    CHECK(e.detuning0[i] == e.detuning0[i + 1]);
    CHECK(e.subclass[i] == -e.subclass[i + 1]);
    sum_sub += e.subclass[i] + e.subclass[i + 1];
  }
  CHECK(sum_sub == 0.0);

  // quantile placement: the empirical CDF tracks the analytic one to O(1/n)
  std::vector<double> det = e.detuning0;
  std::sort(det.begin(), det.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(d.cdf(det[i]) - (i + 0.5) / static_cast<double>(n)));
  CHECK(worst < 2.0 / static_cast<double>(n) * 10.0);
}

TEST_CASE("gaussian_line is a single smooth tooth") {
  const SpectralDensity d = SpectralDensity::gaussian_line(0.0, 30e6);
  CHECK(d.tooth_centers().size() == 1);
  const double total = integrate([&](double w) { return d(w); }, d.lo(), d.hi(), 1e-12);
  CHECK(total == Approx(1.0).margin(1e-6));
}
