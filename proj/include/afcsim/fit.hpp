#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "afcsim/units.hpp"

namespace afcsim {

struct LmOptions {
  int max_iterations = 200;
  double tolerance = 1e-13;  // relative RSS decrease
  double lambda0 = 1e-3;
};

struct LmResult {
  Eigen::VectorXd params;
  bool converged = false;
  double rss = 0.0;
  int iterations = 0;
  Eigen::MatrixXd covariance;  // sigma^2 (J^T J)^-1
};

// Dense Levenberg-Marquardt. The model fills residuals and, when the pointer
// is non-null, the Jacobian d r_i / d p_j.
inline LmResult levenberg_marquardt(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd*)>& model,
    Eigen::VectorXd p, const LmOptions& opts = {}) {
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  model(p, r, &jac);
  double rss = r.squaredNorm();
  double lambda = opts.lambda0;

  LmResult result;
  result.converged = false;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
      const Eigen::VectorXd step = a.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Eigen::VectorXd rnew;
      const Eigen::VectorXd pnew = p + step;
      model(pnew, rnew, nullptr);
      const double rss_new = rnew.squaredNorm();
      if (rss_new <= rss) {
        const double drop = rss - rss_new;
        p = pnew;
        model(p, r, &jac);
        rss = rss_new;
        lambda = std::max(lambda * 0.3, 1e-14);
        accepted = true;
        if (drop <= opts.tolerance * std::max(rss, std::numeric_limits<double>::min()))
          result.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      result.converged = true;  // no downhill direction left
      break;
    }
    if (result.converged) break;
  }

  result.params = p;
  result.rss = rss;
  result.iterations = it;
  const auto m = static_cast<int>(r.size());
  const auto k = static_cast<int>(p.size());
  if (m > k) {
    const double sigma2 = rss / static_cast<double>(m - k);
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    jtj.diagonal() += Eigen::VectorXd::Constant(k, 1e-300);
    result.covariance = sigma2 * jtj.inverse();
  }
  return result;
}

struct GaussianFit {
  double amplitude = 0.0;
  double center = 0.0;
  double sigma = 0.0;
  bool converged = false;
  double rss = 0.0;
  double center_stderr = 0.0;
  double fwhm() const { return sigma_to_fwhm(sigma); }
};

// first and second moments of a non-negative sample profile
inline void profile_moments(const std::vector<double>& x, const std::vector<double>& y,
                            double& mean, double& rms) {
  double w = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double yi = std::max(y[i], 0.0);
    w += yi;
    m1 += yi * x[i];
  }
  if (!(w > 0.0)) throw std::invalid_argument("profile_moments: profile has no weight");
  mean = m1 / w;
  double m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m2 += std::max(y[i], 0.0) * (x[i] - mean) * (x[i] - mean);
  rms = std::sqrt(m2 / w);
}

// Fit y = A exp(-(x-mu)^2 / (2 sigma^2)); starts from the profile moments.
inline GaussianFit fit_gaussian(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 4) throw std::invalid_argument("fit_gaussian: need >= 4 samples");
  double mu0, sig0;
  profile_moments(x, y, mu0, sig0);
  double a0 = 0.0;
  for (double v : y) a0 = std::max(a0, v);
  if (!(sig0 > 0.0) || !(a0 > 0.0)) return {};

  const auto model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const double a = p[0], mu = p[1], sig = p[2];
    const auto n = static_cast<Eigen::Index>(x.size());
    r.resize(n);
    if (jac) jac->resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dx = x[static_cast<std::size_t>(i)] - mu;
      const double e = std::exp(-0.5 * dx * dx / (sig * sig));
      r[i] = a * e - y[static_cast<std::size_t>(i)];
      if (jac) {
        (*jac)(i, 0) = e;
        (*jac)(i, 1) = a * e * dx / (sig * sig);
        (*jac)(i, 2) = a * e * dx * dx / (sig * sig * sig);
      }
    }
  };

  Eigen::VectorXd p0(3);
  p0 << a0, mu0, sig0;
  const LmResult res = levenberg_marquardt(model, p0);

  GaussianFit fit;
  fit.amplitude = res.params[0];
  fit.center = res.params[1];
  fit.sigma = std::abs(res.params[2]);
  fit.converged = res.converged && std::isfinite(fit.sigma) && fit.sigma > 0.0 && fit.amplitude > 0.0;
  fit.rss = res.rss;
  if (res.covariance.size() == 9) fit.center_stderr = std::sqrt(std::max(0.0, res.covariance(1, 1)));
  return fit;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double fn = static_cast<double>(n);
  const double det = fn * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = (fn * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / fn;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.slope * x[i] - f.intercept;
      ssr += r * r;
    }
    f.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) * fn / det);
  }
  return f;
}

inline LinearFit fit_line_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 1) throw std::invalid_argument("fit_line_through_origin: empty input");
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line_through_origin: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = 0.0;
  if (n > 1) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.slope * x[i];
      ssr += r * r;
    }
    f.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 1) / sxx);
  }
  return f;
}

}  // namespace afcsim
