#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "tune/error.hpp"
#include "tune/search_space.hpp"

namespace tune {

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * 0.3989422804014326779; // 1/sqrt(2*pi)
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

struct GPParams {
  double length_scale = 1.0; // in standardized input units
  double signal_var = 1.0;
  double noise_var = 1e-6;
};

//! Squared-exponential GP posterior over standardized inputs and centered
//! scores. Fields are public for diagnostics and gradient checks.
struct GPModel {
  Eigen::MatrixXd inputs;  // standardized, one row per observation
  Eigen::MatrixXd chol;    // lower Cholesky factor of K + noise*I (+ jitter)
  Eigen::VectorXd alpha;   // (K + noise*I)^{-1} (y - y_mean)
  std::vector<double> dim_mean;
  std::vector<double> dim_scale;
  double y_mean = 0.0;
  GPParams params;
  double jitter = 0.0;
  double log_marginal = -std::numeric_limits<double>::infinity();
  bool degenerate = false; // all scores equal; signal variance floored

  Eigen::VectorXd standardize(const RealVector& x) const {
    if (x.size() != dim_mean.size())
      fail(errc::dimension_mismatch, "GP input has wrong dimension");
    Eigen::VectorXd out(static_cast<Eigen::Index>(x.size()));
    for (std::size_t d = 0; d < x.size(); ++d)
      out[static_cast<Eigen::Index>(d)] = (x[d] - dim_mean[d]) / dim_scale[d];
    return out;
  }
};

namespace detail {

inline Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const GPParams& p) {
  Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  double inv2l2 = 1.0 / (2.0 * p.length_scale * p.length_scale);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = p.signal_var;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double d2 = (X.row(i) - X.row(j)).squaredNorm();
      double v = p.signal_var * std::exp(-d2 * inv2l2);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

struct CholFit {
  Eigen::MatrixXd L;
  Eigen::VectorXd alpha;
  double log_marginal = -std::numeric_limits<double>::infinity();
  double jitter = 0.0;
  bool ok = false;
};

//! Cholesky of K + noise*I with escalating jitter until SPD, plus the log
//! marginal likelihood of the centered scores.
inline CholFit chol_fit(const Eigen::MatrixXd& K, double noise_var,
                        const Eigen::VectorXd& y_centered) {
  Eigen::Index n = K.rows();
  CholFit fit;
  double jitter = 0.0;
  for (int attempt = 0; attempt < 16; ++attempt) {
    Eigen::MatrixXd A = K;
    A.diagonal().array() += noise_var + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      fit.L = llt.matrixL();
      fit.alpha = llt.solve(y_centered);
      double log_det = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(fit.L(i, i));
      fit.log_marginal = -0.5 * y_centered.dot(fit.alpha) - log_det -
                         0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
      fit.jitter = jitter;
      fit.ok = true;
      return fit;
    }
    jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0;
  }
  return fit;
}

} // namespace detail

//! Fit with fixed kernel hyperparameters (length scale in standardized units).
inline GPModel gp_fit_fixed(const std::vector<RealVector>& X, const std::vector<double>& y,
                            const GPParams& params) {
  if (X.size() < 2) fail(errc::degenerate_inputs, "GP fit needs at least 2 points");
  if (X.size() != y.size()) fail(errc::dimension_mismatch, "input/score count mismatch");
  std::size_t dim = X.front().size();
  for (const auto& x : X)
    if (x.size() != dim) fail(errc::dimension_mismatch, "ragged GP inputs");

  GPModel model;
  model.params = params;
  model.dim_mean.assign(dim, 0.0);
  model.dim_scale.assign(dim, 1.0);
  auto n = static_cast<Eigen::Index>(X.size());
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& x : X) mean += x[d];
    mean /= static_cast<double>(X.size());
    double var = 0.0;
    for (const auto& x : X) var += (x[d] - mean) * (x[d] - mean);
    var /= static_cast<double>(X.size());
    model.dim_mean[d] = mean;
    model.dim_scale[d] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  model.inputs.resize(n, static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < n; ++i)
    model.inputs.row(i) = model.standardize(X[static_cast<std::size_t>(i)]).transpose();

  model.y_mean = 0.0;
  for (double v : y) model.y_mean += v;
  model.y_mean /= static_cast<double>(y.size());
  Eigen::VectorXd yc(n);
  for (Eigen::Index i = 0; i < n; ++i) yc[i] = y[static_cast<std::size_t>(i)] - model.y_mean;

  Eigen::MatrixXd K = detail::kernel_matrix(model.inputs, model.params);
  detail::CholFit fit = detail::chol_fit(K, model.params.noise_var, yc);
  if (!fit.ok) fail(errc::degenerate_inputs, "kernel matrix is not positive definite");
  model.chol = std::move(fit.L);
  model.alpha = std::move(fit.alpha);
  model.jitter = fit.jitter;
  model.log_marginal = fit.log_marginal;
  return model;
}

//! Fit with hyperparameters chosen by log marginal likelihood over a fixed
//! grid: length scale in {0.1, 0.3, 1, 3, 10} (standardized space), noise
//! variance in {1e-6, 1e-4, 1e-2}, signal variance = sample variance of y.
//! All-equal scores yield a flagged degenerate model with a floored signal.
inline GPModel gp_fit(const std::vector<RealVector>& X, const std::vector<double>& y) {
  if (X.size() < 2) fail(errc::degenerate_inputs, "GP fit needs at least 2 points");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size() - 1);

  bool degenerate =
      !(var > 0.0) || std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
  double signal = degenerate ? 1e-8 : var;

  static constexpr double kLengthScales[] = {0.1, 0.3, 1.0, 3.0, 10.0};
  static constexpr double kNoiseVars[] = {1e-6, 1e-4, 1e-2};

  GPModel best;
  bool have = false;
  for (double ls : kLengthScales) {
    for (double nv : kNoiseVars) {
      GPModel candidate = gp_fit_fixed(X, y, GPParams{ls, signal, nv});
      if (!have || candidate.log_marginal > best.log_marginal) {
        best = std::move(candidate);
        have = true;
      }
    }
  }
  best.degenerate = degenerate;
  return best;
}

//! Posterior (mean, variance) at a raw-coordinate input; the variance is
//! clamped at zero from below.
inline std::pair<double, double> gp_predict(const GPModel& model, const RealVector& x) {
  Eigen::VectorXd xs = model.standardize(x);
  Eigen::Index n = model.inputs.rows();
  Eigen::VectorXd k(n);
  double inv2l2 = 1.0 / (2.0 * model.params.length_scale * model.params.length_scale);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d2 = (model.inputs.row(i).transpose() - xs).squaredNorm();
    k[i] = model.params.signal_var * std::exp(-d2 * inv2l2);
  }
  double mean = model.y_mean + k.dot(model.alpha);
  Eigen::VectorXd v = model.chol.triangularView<Eigen::Lower>().solve(k);
  double variance = model.params.signal_var - v.squaredNorm();
  return {mean, variance > 0.0 ? variance : 0.0};
}

//! Expected improvement over `best` for a maximization posterior N(mean, variance).
inline double expected_improvement(double mean, double variance, double best) {
  if (!(variance > 0.0)) return 0.0;
  double s = std::sqrt(variance);
  double z = (mean - best) / s;
  double ei = (mean - best) * normal_cdf(z) + s * normal_pdf(z);
  return ei > 0.0 ? ei : 0.0;
}

} // namespace tune
