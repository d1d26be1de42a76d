#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <utility>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irradcast/error.hpp"
#include "irradcast/forecast.hpp"
#include "irradcast/time_series.hpp"

namespace irradcast {

/// (p, d, q) x (P, D, Q)_s structure. Polynomials follow the Box-Jenkins sign
/// convention:
///
///   phi(B) Phi(B^s) (1-B)^d (1-B^s)^D y_t = c + theta(B) Theta(B^s) e_t
///   phi(B) = 1 - phi_1 B - ... - phi_p B^p,  theta(B) = 1 - theta_1 B - ...
///
/// so an MA(1) with theta_1 = 0.5 is y_t = e_t - 0.5 e_{t-1}.
struct ArimaSpec {
  int p = 0;
  int d = 0;
  int q = 0;
  int P = 0;
  int D = 0;
  int Q = 0;
  int s = 0;  // 0 iff P = D = Q = 0
  bool include_constant = true;

  void validate() const;
  int parameter_count() const { return p + q + P + Q + (include_constant ? 1 : 0); }
  /// Minimum training length: 10 (p + q + P + Q + 1) + d + D s.
  Eigen::Index min_training_length() const;
  bool operator==(const ArimaSpec&) const = default;
};

namespace detail {

/// Nonzero terms (k, a_k), k >= 1, of (1 - B)^d (1 - B^s)^D = 1 + sum_k a_k B^k.
std::vector<std::pair<Eigen::Index, long double>> differencing_operator(int d, int D, int s);

/// y_t = w_t - sum_k a_k y_{t-k} in extended precision; `y` holds the lags.
template <typename Lookup>
long double undo_step(long double w, const std::vector<std::pair<Eigen::Index, long double>>& op, Lookup&& y) {
  for (const auto& [k, a] : op) w -= a * y(k);
  return w;
}

}  // namespace detail

/// Applies (1-B)^d (1-B^s)^D. Output has n - d - D s elements.
///
/// Each output is rounded so that `integrate`, started from the first d + D s
/// levels, rebuilds the input to within half an ulp of the differenced value:
/// the rounding error of one step is fed into the next instead of piling up
/// through the running sums that undo the operator.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> difference(const Eigen::MatrixBase<Derived>& x, int d, int D,
                                                                      int s) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (d < 0 || D < 0 || (D > 0 && s < 1)) throw RangeError("invalid differencing orders");
  const Eigen::Index need = Eigen::Index(d) + Eigen::Index(D) * s;
  if (x.size() <= need) throw RangeError("series too short to difference");
  const auto op = detail::differencing_operator(d, D, s);

  Vec rebuilt = x;  // what integrate will see
  Vec w(x.size() - need);
  for (Eigen::Index t = need; t < x.size(); ++t) {
    auto lag = [&](Eigen::Index k) -> long double { return rebuilt[t - k]; };
    const long double tail = detail::undo_step(0.0L, op, lag);
    Scalar best = Scalar(static_cast<long double>(x[t]) - tail);
    Scalar best_level = Scalar(detail::undo_step(best, op, lag));
    for (Scalar candidate : {std::nextafter(best, Scalar(-INFINITY)), std::nextafter(best, Scalar(INFINITY))}) {
      const Scalar level = Scalar(detail::undo_step(candidate, op, lag));
      if (std::abs(level - x[t]) < std::abs(best_level - x[t])) best = candidate, best_level = level;
    }
    w[t - need] = best;
    rebuilt[t] = best_level;
  }
  return w;
}

/// Inverse of `difference`: rebuilds levels that follow `history` from their
/// differenced values. `history` must hold at least d + D s levels immediately
/// preceding the first forecast.
template <typename DerivedW, typename DerivedH>
Eigen::Matrix<typename DerivedW::Scalar, Eigen::Dynamic, 1> integrate(const Eigen::MatrixBase<DerivedW>& diffs,
                                                                      const Eigen::MatrixBase<DerivedH>& history,
                                                                      int d, int D, int s) {
  using Scalar = typename DerivedW::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (d < 0 || D < 0 || (D > 0 && s < 1)) throw RangeError("invalid differencing orders");
  const Eigen::Index need = Eigen::Index(d) + Eigen::Index(D) * s;
  if (history.size() < need) throw RangeError("history too short to integrate");
  const auto op = detail::differencing_operator(d, D, s);

  const Eigen::Index base = history.size();
  Vec level(diffs.size());
  for (Eigen::Index t = 0; t < diffs.size(); ++t) {
    auto lag = [&](Eigen::Index k) -> long double { return t - k < 0 ? history[base + t - k] : level[t - k]; };
    level[t] = Scalar(detail::undo_step(diffs[t], op, lag));
  }
  return level;
}

struct ArimaCoefficients {
  Eigen::VectorXd phi;             // p
  Eigen::VectorXd theta;           // q
  Eigen::VectorXd seasonal_phi;    // P
  Eigen::VectorXd seasonal_theta;  // Q
  double constant = 0.0;
};

/// Fitted ARIMA/SARIMA. The differencing and seasonal factors are multiplied
/// out once so that one-step prediction is a pair of dot products in levels.
class ArimaModel final : public TrainedModel {
 public:
  ArimaModel(ArimaSpec spec, ArimaCoefficients coefficients, double residual_variance);

  const ArimaSpec& spec() const { return spec_; }
  const ArimaCoefficients& coefficients() const { return coef_; }
  double residual_variance() const { return sigma2_; }

  const std::vector<int>& required_lags() const override { return ar_offsets_; }
  const std::vector<int>& residual_lags() const override { return ma_offsets_; }
  double predict_one(std::span<const double> lags, std::span<const double> residuals) const override;
  Eigen::VectorXd one_step_residuals(const Eigen::Ref<const Eigen::VectorXd>& history) const override;
  std::string describe() const override;

  /// Smallest root modulus over the four factor polynomials (seasonal ones in B^s).
  double min_root_modulus() const;

  /// One-line self-describing record, lossless for every coefficient.
  std::string to_record() const;
  static ArimaModel from_record(std::string_view record);

 private:
  ArimaSpec spec_;
  ArimaCoefficients coef_;
  double sigma2_;
  std::vector<int> ar_offsets_;
  std::vector<double> ar_coefs_;
  std::vector<int> ma_offsets_;
  std::vector<double> ma_coefs_;
};

/// Coefficients of 1 - c_1 B - ... - c_n B^n from partial autocorrelations in (-1, 1).
Eigen::VectorXd pacf_to_coefficients(const Eigen::Ref<const Eigen::VectorXd>& pacf);
/// Inverse map; returns false when the polynomial is not strictly stable.
bool coefficients_to_pacf(const Eigen::Ref<const Eigen::VectorXd>& coefficients, Eigen::VectorXd& pacf);

/// Smallest modulus among the roots of 1 - c_1 z - ... - c_n z^n (infinity for n = 0).
double min_root_modulus(const Eigen::Ref<const Eigen::VectorXd>& coefficients);

struct ArimaFitOptions {
  std::chrono::duration<double> timeout{60.0};
  double root_margin = 1.001;
  int max_function_evaluations = 4000;
};

/// Conditional (CSS) Gaussian log-likelihood with sigma^2 concentrated out.
/// Terms whose window touches an excluded or invalid point are skipped and the
/// residual recursion restarts from zero shocks after them.
double conditional_log_likelihood(const ArimaSpec& spec, const ArimaCoefficients& coefficients,
                                  const Eigen::Ref<const Eigen::VectorXd>& values, const Mask& include);

/// Maximum (conditional) likelihood fit. Starting values come from a
/// Hannan-Rissanen regression; refinement is Levenberg-Marquardt on the CSS
/// residuals with AR and MA factors parameterized through partial
/// autocorrelations, which keeps every iterate stationary and invertible.
///
/// Throws RangeError (too little data), TrainingTimeoutError, or
/// UnstableModelError (a root within the margin, or a non-finite optimum).
ArimaModel fit_arima(const Eigen::Ref<const Eigen::VectorXd>& values, const Mask& include, const ArimaSpec& spec,
                     const ArimaFitOptions& options = {});
ArimaModel fit_arima(const TimeSeries& training, const ArimaSpec& spec, const ArimaFitOptions& options = {});

}  // namespace irradcast
