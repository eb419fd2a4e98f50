#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "peakcast/error.hpp"
#include "peakcast/features.hpp"
#include "peakcast/lstm.hpp"
#include "peakcast/trace.hpp"

namespace peakcast {

inline constexpr std::size_t kFlatInputDim = kInputHours * kFeatureDim;

/// Per-output-hour ridge regression on the flattened 48x39 window; the intercept is not penalized.
struct LinRegModel {
  Matrix weights;    // 24 x 1872, input index = step * 39 + feature
  Vector intercept;  // 24
  double ridge_lambda = 1e-6;
  std::uint16_t feature_layout_version = kFeatureLayoutVersion;
  NormalizationParams normalization;

  std::size_t parameter_count() const { return static_cast<std::size_t>(weights.size() + intercept.size()); }
};

inline Vector flatten_inputs(std::span<const FeatureVector> inputs) {
  Vector x(static_cast<Eigen::Index>(inputs.size() * kFeatureDim));
  for (std::size_t t = 0; t < inputs.size(); ++t)
    for (std::size_t f = 0; f < kFeatureDim; ++f) x[static_cast<Eigen::Index>(t * kFeatureDim + f)] = inputs[t][f];
  return x;
}

/// Design matrix (samples x features) and normalized targets (samples x 24).
inline std::pair<Matrix, Matrix> linreg_design(std::span<const WindowSample> samples, const NormalizationParams& norm) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Matrix X(n, static_cast<Eigen::Index>(kFlatInputDim));
  Matrix Y(n, static_cast<Eigen::Index>(kHorizon));
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto& w = samples[static_cast<std::size_t>(s)];
    if (w.inputs.size() != kInputHours) fail(ErrorCode::DimensionMismatch, "window does not hold 48 input hours");
    X.row(s) = flatten_inputs(w.inputs).transpose();
    for (std::size_t h = 0; h < kHorizon; ++h)
      Y(s, static_cast<Eigen::Index>(h)) = normalize(w.target_kw[h], norm.demand_min, norm.demand_max);
  }
  return {std::move(X), std::move(Y)};
}

/// Solves (Xc'Xc + lambda I) W' = Xc'Yc on centered data; intercept = mean(Y) - W mean(X).
inline LinRegModel fit_linreg(const Matrix& X, const Matrix& Y, double ridge_lambda) {
  if (X.rows() < 1 || X.rows() != Y.rows()) fail(ErrorCode::EmptyDataset, "fit_linreg needs >= 1 sample");
  if (!(ridge_lambda >= 0.0)) fail(ErrorCode::ConfigError, "ridge_lambda must be >= 0");
  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const Eigen::RowVectorXd y_mean = Y.colwise().mean();
  const Matrix Xc = X.rowwise() - x_mean;
  const Matrix Yc = Y.rowwise() - y_mean;
  Matrix gram = Matrix::Zero(X.cols(), X.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(Xc.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += ridge_lambda;
  const Matrix rhs = Xc.transpose() * Yc;

  Matrix coef;
  Eigen::LDLT<Matrix> ldlt(gram);
  const auto& d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(dmax > 0.0) || d.minCoeff() <= 1e-13 * dmax)
    fail(ErrorCode::SingularSystem, "normal equations are singular; use ridge_lambda > 0");
  coef = ldlt.solve(rhs);

  LinRegModel m;
  m.ridge_lambda = ridge_lambda;
  m.weights = coef.transpose();
  m.intercept = (y_mean - x_mean * coef).transpose();
  return m;
}

inline LinRegModel fit_linreg(std::span<const WindowSample> train, const NormalizationParams& norm,
                              double ridge_lambda = 1e-6) {
  if (train.empty()) fail(ErrorCode::EmptyDataset, "fit_linreg needs >= 1 sample");
  auto [X, Y] = linreg_design(train, norm);
  LinRegModel m = fit_linreg(X, Y, ridge_lambda);
  m.normalization = norm;
  return m;
}

inline DayProfile predict_linreg(const LinRegModel& model, std::span<const FeatureVector> inputs) {
  if (inputs.size() != kInputHours || model.weights.cols() != static_cast<Eigen::Index>(kFlatInputDim) ||
      model.weights.rows() != static_cast<Eigen::Index>(kHorizon))
    fail(ErrorCode::DimensionMismatch, "predict_linreg: inputs or weights do not match the feature layout");
  const Vector y = model.weights * flatten_inputs(inputs) + model.intercept;
  DayProfile out{};
  for (std::size_t h = 0; h < kHorizon; ++h)
    out[h] = denormalize(y[static_cast<Eigen::Index>(h)], model.normalization.demand_min,
                         model.normalization.demand_max);
  return out;
}

/// Yesterday's 24 hourly demands, sliced straight from the trace.
inline DayProfile seasonal_naive_predict(const DemandTrace& trace, Date target_date) {
  const auto first = trace.index_of(DateHour{target_date - std::chrono::days{1}, 0});
  const auto last = trace.index_of(DateHour{target_date - std::chrono::days{1}, 23});
  if (first < 0 || last < 0) fail(ErrorCode::MissingHistory, "trace lacks the day before " + format_date(target_date));
  DayProfile out{};
  for (std::size_t h = 0; h < kHorizon; ++h) out[h] = trace[static_cast<std::size_t>(first) + h].demand_kw;
  return out;
}

}  // namespace peakcast
