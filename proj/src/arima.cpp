#include "irradcast/arima.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace irradcast {

std::vector<std::pair<Eigen::Index, long double>> detail::differencing_operator(int d, int D, int s) {
  const Eigen::Index need = Eigen::Index(d) + Eigen::Index(D) * s;
  std::vector<long double> a(std::size_t(need) + 1, 0.0L);
  a[0] = 1.0L;
  auto multiply = [&](Eigen::Index lag) {
    for (Eigen::Index k = need; k >= lag; --k) a[std::size_t(k)] -= a[std::size_t(k - lag)];
  };
  for (int i = 0; i < d; ++i) multiply(1);
  for (int i = 0; i < D; ++i) multiply(s);
  std::vector<std::pair<Eigen::Index, long double>> out;
  for (Eigen::Index k = 1; k <= need; ++k)
    if (a[std::size_t(k)] != 0.0L) out.emplace_back(k, a[std::size_t(k)]);
  return out;
}
namespace {

using Poly = Eigen::VectorXd;  // c_0 + c_1 B + ..., c_0 = 1

Poly factor_poly(const Eigen::VectorXd& coefs, int stride) {
  Poly out = Poly::Zero(coefs.size() * stride + 1);
  out[0] = 1.0;
  for (Eigen::Index i = 0; i < coefs.size(); ++i) out[(i + 1) * stride] = -coefs[i];
  return out;
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out = Poly::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (Eigen::Index j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly difference_poly(int d, int D, int s) {
  Poly out = Poly::Ones(1);
  for (int i = 0; i < d; ++i) out = multiply(out, factor_poly(Eigen::VectorXd::Ones(1), 1));
  for (int i = 0; i < D; ++i) out = multiply(out, factor_poly(Eigen::VectorXd::Ones(1), s));
  return out;
}

struct SparseLags {
  std::vector<int> lag;  // positive lags
  std::vector<double> coef;
};

// Nonzero terms of 1 - sum coef_i B^i, returned as (i, coef_i).
SparseLags sparse_terms(const Poly& poly) {
  SparseLags out;
  for (Eigen::Index i = 1; i < poly.size(); ++i) {
    if (poly[i] != 0.0) {
      out.lag.push_back(int(i));
      out.coef.push_back(-poly[i]);
    }
  }
  return out;
}

// Structural (parameter-independent) lags of a polynomial family: every lag that
// can be nonzero for generic coefficients.
std::vector<int> structural_lags(int order, int seasonal_order, int s) {
  std::vector<int> lags;
  for (int I = 0; I <= seasonal_order; ++I)
    for (int i = 0; i <= order; ++i)
      if (i + I * s > 0) lags.push_back(i + I * s);
  std::sort(lags.begin(), lags.end());
  lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
  return lags;
}

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  char buf[40];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

Eigen::VectorXd split_doubles(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    double v = 0.0;
    const auto cell = text.substr(pos, comma - pos);
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) throw RangeError("bad number in model record");
    out.push_back(v);
    pos = comma + 1;
  }
  return Eigen::Map<Eigen::VectorXd>(out.data(), Eigen::Index(out.size()));
}

// Validity of differenced points and of CSS terms, both parameter independent.
struct CssLayout {
  Eigen::VectorXd w;
  Mask w_ok;
  Mask term_ok;
  Eigen::Index terms = 0;
};

CssLayout css_layout(const ArimaSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& values, const Mask& include) {
  CssLayout out;
  const Eigen::Index shift = Eigen::Index(spec.d) + Eigen::Index(spec.D) * spec.s;
  Eigen::VectorXd safe = values;
  for (Eigen::Index i = 0; i < safe.size(); ++i)
    if (!include[i]) safe[i] = 0.0;
  out.w = difference(safe, spec.d, spec.D, spec.s);
  const SparseLags diff = sparse_terms(difference_poly(spec.d, spec.D, spec.s));
  const Eigen::Index n = out.w.size();
  out.w_ok.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    bool ok = include[t + shift];
    for (int k : diff.lag) ok = ok && include[t + shift - k];
    out.w_ok[t] = ok;
  }
  const auto ar = structural_lags(spec.p, spec.P, spec.s);
  const int max_ar = ar.empty() ? 0 : ar.back();
  out.term_ok.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    bool ok = t >= max_ar && out.w_ok[t];
    for (int k : ar) ok = ok && out.w_ok[t - k];
    out.term_ok[t] = ok;
  }
  out.terms = out.term_ok.count();
  return out;
}

// e_t = w_t - c - sum alpha_i w_{t-i} + sum beta_j e_{t-j}; zero outside valid terms.
void css_residuals(const CssLayout& layout, const SparseLags& ar, const SparseLags& ma, double constant,
                   Eigen::VectorXd& e) {
  const Eigen::Index n = layout.w.size();
  e.setZero(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (!layout.term_ok[t]) continue;
    double v = layout.w[t] - constant;
    for (std::size_t i = 0; i < ar.lag.size(); ++i) v -= ar.coef[i] * layout.w[t - ar.lag[i]];
    for (std::size_t j = 0; j < ma.lag.size(); ++j)
      if (t - ma.lag[j] >= 0) v += ma.coef[j] * e[t - ma.lag[j]];
    e[t] = v;
  }
}

SparseLags ar_terms(const ArimaSpec& spec, const ArimaCoefficients& c) {
  return sparse_terms(multiply(factor_poly(c.phi, 1), factor_poly(c.seasonal_phi, std::max(spec.s, 1))));
}

SparseLags ma_terms(const ArimaSpec& spec, const ArimaCoefficients& c) {
  return sparse_terms(multiply(factor_poly(c.theta, 1), factor_poly(c.seasonal_theta, std::max(spec.s, 1))));
}

double concentrated_loglik(double sse, Eigen::Index n) {
  const double sigma2 = sse / double(n);
  return -0.5 * double(n) * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
}

// Unconstrained parameters -> coefficients.
struct ParamMap {
  ArimaSpec spec;
  double constant_scale = 1.0;

  ArimaCoefficients unpack(const Eigen::VectorXd& x) const {
    ArimaCoefficients c;
    Eigen::Index at = 0;
    auto take = [&](int n) {
      Eigen::VectorXd r = x.segment(at, n).array().tanh();
      at += n;
      return pacf_to_coefficients(r);
    };
    c.phi = take(spec.p);
    c.theta = take(spec.q);
    c.seasonal_phi = take(spec.P);
    c.seasonal_theta = take(spec.Q);
    c.constant = spec.include_constant ? x[at] * constant_scale : 0.0;
    return c;
  }
};

struct CssFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const CssLayout* layout;
  ParamMap map;
  std::chrono::steady_clock::time_point deadline;
  int n_inputs;

  int inputs() const { return n_inputs; }
  int values() const { return int(layout->w.size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    if (std::chrono::steady_clock::now() > deadline) throw TrainingTimeoutError("ARIMA fit exceeded its time budget");
    const ArimaCoefficients c = map.unpack(x);
    css_residuals(*layout, ar_terms(map.spec, c), ma_terms(map.spec, c), c.constant, fvec);
    return 0;
  }
};

// Least squares on rows where every regressor is available; nullopt when underdetermined.
std::optional<Eigen::VectorXd> least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() <= X.cols() || X.cols() == 0) return std::nullopt;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) return std::nullopt;
  Eigen::VectorXd beta = qr.solve(y);
  if (!beta.allFinite()) return std::nullopt;
  return beta;
}

// Regress w_t on [1?, w lags, e lags] over rows with complete data.
std::optional<Eigen::VectorXd> lag_regression(const Eigen::VectorXd& w, const Mask& ok, const Eigen::VectorXd* e,
                                              const Mask* e_ok, int p, int q, bool intercept) {
  const Eigen::Index n = w.size();
  const int cols = p + q + (intercept ? 1 : 0);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index t = std::max(p, q); t < n; ++t) {
    bool good = ok[t];
    for (int i = 1; i <= p && good; ++i) good = ok[t - i];
    for (int j = 1; j <= q && good; ++j) good = (*e_ok)[t - j];
    if (good) rows.push_back(t);
  }
  Eigen::MatrixXd X(Eigen::Index(rows.size()), cols);
  Eigen::VectorXd y(Eigen::Index(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::Index t = rows[r];
    Eigen::Index c = 0;
    if (intercept) X(Eigen::Index(r), c++) = 1.0;
    for (int i = 1; i <= p; ++i) X(Eigen::Index(r), c++) = w[t - i];
    for (int j = 1; j <= q; ++j) X(Eigen::Index(r), c++) = (*e)[t - j];
    y[Eigen::Index(r)] = w[t];
  }
  return least_squares(X, y);
}

// PACF-space start for a factor, shrunk towards zero until stable.
Eigen::VectorXd start_pacf(Eigen::VectorXd coefs) {
  Eigen::VectorXd r;
  for (int attempt = 0; attempt < 12; ++attempt) {
    if (coefficients_to_pacf(coefs, r)) return r.cwiseMax(-0.95).cwiseMin(0.95);
    coefs *= 0.7;
  }
  return Eigen::VectorXd::Zero(coefs.size());
}

Eigen::VectorXd initial_parameters(const ArimaSpec& spec, const CssLayout& layout, double constant_scale) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(spec.p);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(spec.q);
  double constant = 0.0;

  const Eigen::Index n = layout.w.size();
  if (spec.q == 0) {
    if (auto beta = lag_regression(layout.w, layout.w_ok, nullptr, nullptr, spec.p, 0, spec.include_constant)) {
      const int off = spec.include_constant ? 1 : 0;
      if (spec.include_constant) constant = (*beta)[0];
      phi = beta->segment(off, spec.p);
    }
  } else {
    const int m = int(std::min<Eigen::Index>(std::max(2 * (spec.p + spec.q), 10), std::max<Eigen::Index>(n / 5, 1)));
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    Mask e_ok = Mask::Constant(n, false);
    if (auto beta = lag_regression(layout.w, layout.w_ok, nullptr, nullptr, m, 0, true)) {
      for (Eigen::Index t = m; t < n; ++t) {
        bool good = layout.w_ok[t];
        for (int i = 1; i <= m && good; ++i) good = layout.w_ok[t - i];
        if (!good) continue;
        double fit = (*beta)[0];
        for (int i = 1; i <= m; ++i) fit += (*beta)[i] * layout.w[t - i];
        e[t] = layout.w[t] - fit;
        e_ok[t] = true;
      }
      if (auto gamma = lag_regression(layout.w, layout.w_ok, &e, &e_ok, spec.p, spec.q, spec.include_constant)) {
        const int off = spec.include_constant ? 1 : 0;
        if (spec.include_constant) constant = (*gamma)[0];
        phi = gamma->segment(off, spec.p);
        theta = -gamma->segment(off + spec.p, spec.q);
      }
    }
  }
  if (spec.include_constant && constant == 0.0) {
    double sum = 0.0;
    Eigen::Index cnt = 0;
    for (Eigen::Index t = 0; t < n; ++t)
      if (layout.w_ok[t]) sum += layout.w[t], ++cnt;
    if (cnt) constant = sum / double(cnt) * (1.0 - phi.sum());
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.parameter_count());
  Eigen::Index at = 0;
  auto put = [&](const Eigen::VectorXd& r) {
    x.segment(at, r.size()) = r.array().atanh();
    at += r.size();
  };
  put(start_pacf(phi));
  put(start_pacf(theta));
  at += spec.P + spec.Q;  // seasonal factors start at zero
  if (spec.include_constant) x[at] = constant / constant_scale;
  return x;
}

}  // namespace

void ArimaSpec::validate() const {
  if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0 || s < 0) throw RangeError("negative ARIMA order");
  const bool seasonal = P > 0 || D > 0 || Q > 0;
  if (seasonal && s < 1) throw RangeError("seasonal orders need a season length");
  if (!seasonal && s != 0) throw RangeError("season length given without seasonal orders");
}

Eigen::Index ArimaSpec::min_training_length() const {
  return 10 * Eigen::Index(p + q + P + Q + 1) + d + Eigen::Index(D) * s;
}

Eigen::VectorXd pacf_to_coefficients(const Eigen::Ref<const Eigen::VectorXd>& pacf) {
  const Eigen::Index n = pacf.size();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd prev(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    prev.head(k) = phi.head(k);
    phi[k] = pacf[k];
    for (Eigen::Index j = 0; j < k; ++j) phi[j] = prev[j] - pacf[k] * prev[k - 1 - j];
  }
  return phi;
}

bool coefficients_to_pacf(const Eigen::Ref<const Eigen::VectorXd>& coefficients, Eigen::VectorXd& pacf) {
  const Eigen::Index n = coefficients.size();
  pacf.resize(n);
  Eigen::VectorXd cur = coefficients;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    const double r = cur[k];
    if (!(std::abs(r) < 1.0)) return false;
    pacf[k] = r;
    Eigen::VectorXd next(k);
    for (Eigen::Index j = 0; j < k; ++j) next[j] = (cur[j] + r * cur[k - 1 - j]) / (1.0 - r * r);
    cur = next;
  }
  return true;
}

double min_root_modulus(const Eigen::Ref<const Eigen::VectorXd>& coefficients) {
  Eigen::Index n = coefficients.size();
  while (n > 0 && coefficients[n - 1] == 0.0) --n;
  if (n == 0) return std::numeric_limits<double>::infinity();
  // Roots z of 1 - sum c_i z^i are reciprocals of the companion eigenvalues.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  companion.row(0) = coefficients.head(n).transpose();
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
  const double largest = eig.cwiseAbs().maxCoeff();
  return largest > 0.0 ? 1.0 / largest : std::numeric_limits<double>::infinity();
}

ArimaModel::ArimaModel(ArimaSpec spec, ArimaCoefficients coefficients, double residual_variance)
    : spec_(spec), coef_(std::move(coefficients)), sigma2_(residual_variance) {
  spec_.validate();
  if (coef_.phi.size() != spec_.p || coef_.theta.size() != spec_.q || coef_.seasonal_phi.size() != spec_.P ||
      coef_.seasonal_theta.size() != spec_.Q)
    throw DimensionError("coefficient counts do not match the ARIMA spec");
  const int stride = std::max(spec_.s, 1);
  const Poly level_ar = multiply(multiply(factor_poly(coef_.phi, 1), factor_poly(coef_.seasonal_phi, stride)),
                                 difference_poly(spec_.d, spec_.D, spec_.s));
  const SparseLags ar = sparse_terms(level_ar);
  const SparseLags ma = ma_terms(spec_, coef_);
  for (std::size_t i = 0; i < ar.lag.size(); ++i) {
    ar_offsets_.push_back(1 - ar.lag[i]);
    ar_coefs_.push_back(ar.coef[i]);
  }
  for (std::size_t j = 0; j < ma.lag.size(); ++j) {
    ma_offsets_.push_back(1 - ma.lag[j]);
    ma_coefs_.push_back(ma.coef[j]);
  }
}

double ArimaModel::predict_one(std::span<const double> lags, std::span<const double> residuals) const {
  if (lags.size() != ar_coefs_.size()) throw DimensionError("ARIMA lag vector has wrong dimension");
  if (!ma_coefs_.empty() && residuals.size() != ma_coefs_.size())
    throw DimensionError("ARIMA residual vector has wrong dimension");
  double y = coef_.constant;
  for (std::size_t i = 0; i < ar_coefs_.size(); ++i) y += ar_coefs_[i] * lags[i];
  for (std::size_t j = 0; j < ma_coefs_.size(); ++j) y -= ma_coefs_[j] * residuals[j];
  return y;
}

Eigen::VectorXd ArimaModel::one_step_residuals(const Eigen::Ref<const Eigen::VectorXd>& history) const {
  const Eigen::Index n = history.size();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  const Eigen::Index start = history_depth();
  for (Eigen::Index t = start; t < n; ++t) {
    double pred = coef_.constant;
    for (std::size_t i = 0; i < ar_coefs_.size(); ++i) pred += ar_coefs_[i] * history[t - 1 + ar_offsets_[i]];
    for (std::size_t j = 0; j < ma_coefs_.size(); ++j) pred -= ma_coefs_[j] * e[t - 1 + ma_offsets_[j]];
    e[t] = history[t] - pred;
  }
  return e;
}

std::string ArimaModel::describe() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "arima(%d,%d,%d)x(%d,%d,%d)_%d", spec_.p, spec_.d, spec_.q, spec_.P, spec_.D, spec_.Q,
                spec_.s);
  return buf;
}

double ArimaModel::min_root_modulus() const {
  return std::min({irradcast::min_root_modulus(coef_.phi), irradcast::min_root_modulus(coef_.theta),
                   irradcast::min_root_modulus(coef_.seasonal_phi), irradcast::min_root_modulus(coef_.seasonal_theta)});
}

std::string ArimaModel::to_record() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "arima p=%d d=%d q=%d P=%d D=%d Q=%d s=%d constant=%d c=%.17g sigma2=%.17g", spec_.p,
                spec_.d, spec_.q, spec_.P, spec_.D, spec_.Q, spec_.s, spec_.include_constant ? 1 : 0, coef_.constant,
                sigma2_);
  return std::string(buf) + " phi=" + join(coef_.phi) + " theta=" + join(coef_.theta) +
         " sphi=" + join(coef_.seasonal_phi) + " stheta=" + join(coef_.seasonal_theta);
}

ArimaModel ArimaModel::from_record(std::string_view record) {
  std::map<std::string, std::string, std::less<>> kv;
  std::istringstream in{std::string(record)};
  std::string token;
  in >> token;
  if (token != "arima") throw RangeError("not an ARIMA model record");
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw RangeError("malformed token '" + token + "' in model record");
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw RangeError(std::string("model record lacks '") + key + "'");
    return it->second;
  };
  auto integer = [&](const char* key) { return std::stoi(get(key)); };
  ArimaSpec spec{integer("p"), integer("d"), integer("q"), integer("P"), integer("D"), integer("Q"), integer("s"),
                 integer("constant") != 0};
  ArimaCoefficients c;
  c.constant = split_doubles(get("c"))[0];
  c.phi = split_doubles(get("phi"));
  c.theta = split_doubles(get("theta"));
  c.seasonal_phi = split_doubles(get("sphi"));
  c.seasonal_theta = split_doubles(get("stheta"));
  return ArimaModel(spec, std::move(c), split_doubles(get("sigma2"))[0]);
}

double conditional_log_likelihood(const ArimaSpec& spec, const ArimaCoefficients& coefficients,
                                  const Eigen::Ref<const Eigen::VectorXd>& values, const Mask& include) {
  spec.validate();
  if (include.size() != values.size()) throw DimensionError("mask length differs from values");
  const CssLayout layout = css_layout(spec, values, include);
  if (layout.terms == 0) throw RangeError("no complete CSS terms");
  Eigen::VectorXd e;
  css_residuals(layout, ar_terms(spec, coefficients), ma_terms(spec, coefficients), coefficients.constant, e);
  return concentrated_loglik(e.squaredNorm(), layout.terms);
}

ArimaModel fit_arima(const Eigen::Ref<const Eigen::VectorXd>& values, const Mask& include, const ArimaSpec& spec,
                     const ArimaFitOptions& options) {
  spec.validate();
  if (include.size() != values.size()) throw DimensionError("mask length differs from values");
  if (values.size() < spec.min_training_length())
    throw RangeError("ARIMA needs " + std::to_string(spec.min_training_length()) + " training samples, got " +
                     std::to_string(values.size()));
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(options.timeout);

  const CssLayout layout = css_layout(spec, values, include);
  const int k = spec.parameter_count();
  if (layout.terms <= k) throw RangeError("too few complete observations for the ARIMA fit");

  double scale = 0.0;
  for (Eigen::Index t = 0; t < layout.w.size(); ++t)
    if (layout.w_ok[t]) scale = std::max(scale, std::abs(layout.w[t]));
  ParamMap map{spec, scale > 0.0 ? scale : 1.0};

  Eigen::VectorXd x = initial_parameters(spec, layout, map.constant_scale);
  if (k > 0) {
    CssFunctor functor{&layout, map, deadline, k};
    Eigen::NumericalDiff<CssFunctor> numdiff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<CssFunctor>> lm(numdiff);
    lm.parameters.maxfev = options.max_function_evaluations;
    lm.parameters.xtol = 1e-10;
    lm.parameters.ftol = 1e-12;
    const auto status = lm.minimize(x);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !x.allFinite())
      throw UnstableModelError("ARIMA optimizer failed (status " + std::to_string(int(status)) + ")");
  }

  ArimaCoefficients coef = map.unpack(x);
  Eigen::VectorXd e;
  css_residuals(layout, ar_terms(spec, coef), ma_terms(spec, coef), coef.constant, e);
  const double sigma2 = std::max(e.squaredNorm() / double(layout.terms), std::numeric_limits<double>::min());
  if (!std::isfinite(sigma2) || !coef.phi.allFinite() || !coef.theta.allFinite() || !std::isfinite(coef.constant))
    throw UnstableModelError("ARIMA fit produced non-finite values");

  ArimaModel model(spec, std::move(coef), sigma2);
  const double root = model.min_root_modulus();
  if (root < options.root_margin)
    throw UnstableModelError("no stable model: polynomial root modulus " + std::to_string(root));
  return model;
}

ArimaModel fit_arima(const TimeSeries& training, const ArimaSpec& spec, const ArimaFitOptions& options) {
  return fit_arima(training.values, training.valid, spec, options);
}

}  // namespace irradcast
