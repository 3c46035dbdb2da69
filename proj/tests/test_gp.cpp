#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tune/gp.hpp"
#include "tune/rng.hpp"

using namespace tune;

namespace {

double mc_expected_improvement(double mean, double stddev, double best, std::size_t draws,
                               std::uint64_t seed) {
  RandomStream rng(seed);
  double acc = 0.0;
  for (std::size_t i = 0; i < draws; i += 2) {
    // Box-Muller pair
    double u1 = std::max(rng.next_real(), 1e-300);
    double u2 = rng.next_real();
    double r = std::sqrt(-2.0 * std::log(u1));
    double z1 = r * std::cos(2.0 * M_PI * u2);
    double z2 = r * std::sin(2.0 * M_PI * u2);
    acc += std::max(0.0, mean + stddev * z1 - best);
    acc += std::max(0.0, mean + stddev * z2 - best);
  }
  return acc / static_cast<double>(draws);
}

std::vector<RealVector> sin_inputs() {
  std::vector<RealVector> X;
  for (int i = 0; i < 5; ++i) X.push_back({M_PI * i / 4.0});
  return X;
}

std::vector<double> sin_scores() {
  std::vector<double> y;
  for (int i = 0; i < 5; ++i) y.push_back(std::sin(M_PI * i / 4.0));
  return y;
}

} // namespace

TEST(NormalFunctions, CdfAndPdfReferenceValues) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-12);
  EXPECT_NEAR(normal_cdf(-2.0), 0.02275013194817921, 1e-12);
  EXPECT_NEAR(normal_pdf(0.0), 0.3989422804014327, 1e-15);
  EXPECT_NEAR(normal_pdf(1.5), 0.12951759566589174, 1e-15);
}

TEST(ExpectedImprovement, ZeroVarianceGivesZero) {
  EXPECT_DOUBLE_EQ(expected_improvement(5.0, 0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(expected_improvement(-5.0, 0.0, 0.0), 0.0);
}

TEST(ExpectedImprovement, AtTheIncumbentEqualsPdfTimesSigma) {
  // z = 0: EI = s * phi(0) = 0.3989...
  EXPECT_NEAR(expected_improvement(0.0, 1.0, 0.0), 0.3989422804014327, 1e-12);
  EXPECT_NEAR(expected_improvement(2.0, 4.0, 2.0), 2.0 * 0.3989422804014327, 1e-12);
}

TEST(ExpectedImprovement, MatchesMonteCarloOracle) {
  double mc = mc_expected_improvement(0.0, 1.0, 0.0, 1000000, 48);
  EXPECT_NEAR(expected_improvement(0.0, 1.0, 0.0), mc, 1e-3);
  mc = mc_expected_improvement(0.3, 0.5, 0.6, 1000000, 7);
  EXPECT_NEAR(expected_improvement(0.3, 0.25, 0.6), mc, 1e-3);
}

TEST(ExpectedImprovement, DominantImprovementLimit) {
  EXPECT_NEAR(expected_improvement(5.0, 1e-4, 0.0), 5.0, 1e-6);
}

TEST(ExpectedImprovement, NonNegativeAndMonotoneInMean) {
  RandomStream rng(7);
  for (int i = 0; i < 2000; ++i) {
    double mean = rng.uniform_real(-10.0, 10.0);
    double var = rng.uniform_real(0.0, 9.0);
    double best = rng.uniform_real(-10.0, 10.0);
    double ei = expected_improvement(mean, var, best);
    EXPECT_GE(ei, 0.0);
    double step = rng.uniform_real(0.0, 2.0);
    EXPECT_GE(expected_improvement(mean + step, var, best), ei - 1e-12);
  }
}

TEST(GpFit, DuplicateInputsHandled) {
  std::vector<RealVector> X{{1.0}, {1.0}};
  std::vector<double> y{0.5, 0.5};
  GPModel model = gp_fit(X, y);
  auto [mean, variance] = gp_predict(model, {1.0});
  EXPECT_NEAR(mean, 0.5, 1e-6);
}

TEST(GpFit, AllEqualScoresGiveFlatDegenerateModel) {
  std::vector<RealVector> X{{0.0}, {1.0}, {2.0}};
  std::vector<double> y{0.7, 0.7, 0.7};
  GPModel model = gp_fit(X, y);
  EXPECT_TRUE(model.degenerate);
  for (double x : {-3.0, 0.5, 7.0}) {
    auto [mean, variance] = gp_predict(model, {x});
    EXPECT_NEAR(mean, 0.7, 1e-6);
  }
}

TEST(GpFit, InterpolatesSineAtNoiseFloor) {
  // noise pinned at the 1e-6 floor, length scale chosen by marginal likelihood
  std::vector<double> y = sin_scores();
  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean_y) * (v - mean_y);
  var /= static_cast<double>(y.size() - 1);
  GPModel model;
  bool have = false;
  for (double ls : {0.1, 0.3, 1.0, 3.0, 10.0}) {
    GPModel candidate = gp_fit_fixed(sin_inputs(), y, GPParams{ls, var, 1e-6});
    if (!have || candidate.log_marginal > model.log_marginal) {
      model = std::move(candidate);
      have = true;
    }
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto [mean, variance] = gp_predict(model, sin_inputs()[i]);
    EXPECT_NEAR(mean, y[i], 1e-4);
  }
}

TEST(GpFit, TooFewPointsRejected) {
  std::vector<RealVector> X{{1.0}};
  std::vector<double> y{0.0};
  EXPECT_THROW(gp_fit(X, y), Error);
}

TEST(GpPredict, PosteriorVarianceSmallAtTrainingInputs) {
  GPModel model = gp_fit_fixed(sin_inputs(), sin_scores(), GPParams{1.0, 1.0, 1e-6});
  for (const auto& x : sin_inputs()) {
    auto [mean, variance] = gp_predict(model, x);
    EXPECT_LE(variance, model.params.noise_var + 1e-6);
  }
}

TEST(GpPredict, FarFromDataRevertsToPrior) {
  GPModel model = gp_fit_fixed(sin_inputs(), sin_scores(), GPParams{0.5, 2.0, 1e-6});
  auto [mean, variance] = gp_predict(model, {200.0});
  EXPECT_NEAR(mean, model.y_mean, 1e-9); // prior mean is the centered zero
  EXPECT_NEAR(variance, model.params.signal_var, 1e-9);
}

TEST(GpPredict, SymmetricMidpointHasSymmetricMean) {
  std::vector<RealVector> X{{-1.0}, {1.0}};
  std::vector<double> y{0.4, 0.4};
  GPModel model = gp_fit_fixed(X, y, GPParams{1.0, 1.0, 1e-6});
  auto [mean, variance] = gp_predict(model, {0.0});
  EXPECT_NEAR(mean, 0.4, 1e-9);
}

TEST(GpPredict, DimensionMismatchRejected) {
  GPModel model = gp_fit(sin_inputs(), sin_scores());
  EXPECT_THROW(gp_predict(model, {0.0, 1.0}), Error);
}

TEST(GpPredict, FiniteDifferenceGradientMatchesAnalytic) {
  RandomStream rng(91);
  for (int round = 0; round < 10; ++round) {
    std::vector<RealVector> X;
    std::vector<double> y;
    for (int i = 0; i < 8; ++i) {
      double x = rng.uniform_real(-2.0, 2.0);
      X.push_back({x});
      y.push_back(std::sin(1.3 * x) + 0.1 * x);
    }
    GPModel model = gp_fit_fixed(X, y, GPParams{1.0, 1.0, 1e-4});

    double x0 = rng.uniform_real(-1.5, 1.5);
    // analytic: d mean / dx = sum_i alpha_i k(xs, xi) (xi - xs) / l^2 * (1/scale)
    Eigen::VectorXd xs = model.standardize({x0});
    double l2 = model.params.length_scale * model.params.length_scale;
    double grad = 0.0;
    for (Eigen::Index i = 0; i < model.inputs.rows(); ++i) {
      double diff = model.inputs(i, 0) - xs[0];
      double k = model.params.signal_var * std::exp(-diff * diff / (2.0 * l2));
      grad += model.alpha[i] * k * diff / l2;
    }
    grad /= model.dim_scale[0];

    double h = 1e-5;
    double up = gp_predict(model, {x0 + h}).first;
    double down = gp_predict(model, {x0 - h}).first;
    double fd = (up - down) / (2.0 * h);

    double denom = std::max({std::abs(grad), std::abs(fd), 1e-8});
    EXPECT_LE(std::abs(fd - grad) / denom, 1e-4);
  }
}

TEST(GpFit, ModelSelectionPrefersSmoothFitOverNoise) {
  // smooth quadratic scores: the grid search should reproduce them closely
  std::vector<RealVector> X;
  std::vector<double> y;
  for (int i = 0; i <= 10; ++i) {
    double x = i / 10.0;
    X.push_back({x});
    y.push_back(-(x - 0.3) * (x - 0.3));
  }
  GPModel model = gp_fit(X, y);
  for (std::size_t i = 0; i < X.size(); ++i) {
    auto [mean, variance] = gp_predict(model, X[i]);
    EXPECT_NEAR(mean, y[i], 5e-3);
  }
}
