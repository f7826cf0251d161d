#include "smilerisk/fhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smilerisk/bachelier.hpp"
#include "smilerisk/error.hpp"
#include "smilerisk/format.hpp"

namespace smilerisk {

namespace {

std::vector<double> autocovariances(std::span<const double> x, std::size_t max_lag) {
  if (x.size() <= max_lag + 1) {
    throw Error(Errc::SeriesTooShort, "series of length " + std::to_string(x.size()) +
                                          " is too short for lag " + std::to_string(max_lag));
  }
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  std::vector<double> gamma(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = k; t < x.size(); ++t) s += (x[t] - mean) * (x[t - k] - mean);
    gamma[k] = s / n;
  }
  if (!(gamma[0] > 0.0)) throw Error(Errc::InvalidArgument, "series has zero variance");
  return gamma;
}

}  // namespace

std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
  auto gamma = autocovariances(x, max_lag);
  const double g0 = gamma[0];
  for (auto& g : gamma) g /= g0;
  return gamma;
}

std::vector<double> pacf(std::span<const double> x, std::size_t max_lag) {
  const auto rho = acf(x, max_lag);
  std::vector<double> out(max_lag + 1, 0.0);
  out[0] = 1.0;
  if (max_lag == 0) return out;

  std::vector<double> phi(max_lag + 1, 0.0);
  std::vector<double> prev(max_lag + 1, 0.0);
  phi[1] = rho[1];
  out[1] = rho[1];
  for (std::size_t k = 2; k <= max_lag; ++k) {
    prev = phi;
    double num = rho[k];
    double den = 1.0;
    for (std::size_t j = 1; j < k; ++j) {
      num -= prev[j] * rho[k - j];
      den -= prev[j] * rho[j];
    }
    const double pkk = num / den;
    for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - pkk * prev[k - j];
    phi[k] = pkk;
    out[k] = pkk;
  }
  return out;
}

ArModel fit_ar1(std::span<const double> x, std::string series_id) {
  if (x.size() < 10) throw Error(Errc::SeriesTooShort, "AR(1) fit needs at least 10 points");
  double num = 0.0, den = 0.0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    num += x[t] * x[t - 1];
    den += x[t - 1] * x[t - 1];
  }
  if (!(den > 0.0)) throw Error(Errc::NonStationaryFit, "AR(1) fit on an all-zero series");
  const double beta = num / den;
  if (!(std::abs(beta) < 1.0)) {
    throw Error(Errc::NonStationaryFit, "fitted AR(1) coefficient " + format_number(beta) +
                                            " is not inside (-1, 1)");
  }
  return ArModel{beta, std::move(series_id)};
}

std::vector<double> ar_residuals(std::span<const double> x, const std::optional<ArModel>& model) {
  if (!model) return {x.begin(), x.end()};
  std::vector<double> eps;
  if (x.size() < 2) return eps;
  eps.reserve(x.size() - 1);
  for (std::size_t t = 1; t < x.size(); ++t) eps.push_back(x[t] - model->beta * x[t - 1]);
  return eps;
}

void EwmaParams::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw Error(Errc::InvalidArgument, "EWMA theta must lie in (0,1)");
  if (window < 2) throw Error(Errc::InvalidArgument, "EWMA window must be >= 2");
}

std::vector<double> ewma_variance(std::span<const double> x, const EwmaParams& params) {
  params.validate();
  const std::size_t w = params.window;
  if (x.size() <= w) {
    throw Error(Errc::SeriesTooShort, "EWMA needs more than W = " + std::to_string(w) + " points");
  }
  double seed = 0.0;
  for (std::size_t t = 0; t < w; ++t) seed += x[t] * x[t];
  seed /= static_cast<double>(w);
  const double floor = std::max(1e-12 * seed, std::numeric_limits<double>::min());

  std::vector<double> var;
  var.reserve(x.size() - w);
  var.push_back(std::max(seed, floor));
  for (std::size_t t = w + 1; t < x.size(); ++t) {
    var.push_back(std::max(ewma_step(var.back(), x[t - 1], params.theta), floor));
  }
  return var;
}

std::vector<double> ewma_vol(std::span<const double> x, const EwmaParams& params) {
  auto v = ewma_variance(x, params);
  for (auto& s : v) s = std::sqrt(s);
  return v;
}

double empirical_quantile(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) throw Error(Errc::InsufficientHistory, "quantile of an empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidArgument, "alpha must lie in (0,1)");
  const double n = static_cast<double>(sorted.size());
  const double p = alpha * (n + 1.0);  // 1-based plotting position
  if (p <= 1.0) return sorted.front();
  if (p >= n) return sorted.back();
  const double lower = std::floor(p);
  const auto i = static_cast<std::size_t>(lower) - 1;
  const double frac = p - lower;
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

Matrix rolling_quantiles(std::span<const double> x, std::size_t window,
                         std::span<const double> alphas) {
  if (window == 0) throw Error(Errc::InvalidArgument, "rolling window must be positive");
  if (x.size() <= window) {
    throw Error(Errc::InsufficientHistory, "series of length " + std::to_string(x.size()) +
                                               " has no date with " + std::to_string(window) +
                                               " prior observations");
  }
  Matrix out(x.size() - window, alphas.size());
  std::vector<double> sorted(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(window));
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t t = window; t < x.size(); ++t) {
    for (std::size_t a = 0; a < alphas.size(); ++a)
      out(t - window, a) = empirical_quantile(sorted, alphas[a]);
    // Slide: drop x[t−L], add x[t].
    sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), x[t - window]));
    sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), x[t]), x[t]);
  }
  return out;
}

std::vector<double> rolling_quantile(std::span<const double> x, std::size_t window, double alpha) {
  const double a[] = {alpha};
  return rolling_quantiles(x, window, a).col(0);
}

std::size_t QuantileSeries::column(double alpha) const {
  for (std::size_t i = 0; i < alphas.size(); ++i)
    if (std::abs(alphas[i] - alpha) < 1e-12) return i;
  throw Error(Errc::InvalidArgument, "no forecast for alpha " + format_number(alpha));
}

Matrix forecast_residual_quantile(std::span<const double> devolatized,
                                  std::span<const double> sigma, std::size_t window,
                                  std::span<const double> alphas) {
  if (devolatized.size() != sigma.size()) {
    throw Error(Errc::ShapeMismatch, "devolatized residuals and sigma differ in length");
  }
  Matrix q = rolling_quantiles(devolatized, window, alphas);
  for (std::size_t k = 0; k < q.rows(); ++k)
    for (std::size_t a = 0; a < q.cols(); ++a) q(k, a) *= sigma[window + k];
  return q;
}

QuantileSeries forecast_xi_quantile(std::span<const Date> xi_dates, std::span<const double> xi,
                                    const std::optional<ArModel>& model,
                                    const QuantileSeries& residual_q) {
  if (xi_dates.size() != xi.size()) throw Error(Errc::ShapeMismatch, "xi values and dates differ");
  QuantileSeries out = residual_q;
  if (!model) return out;
  for (std::size_t k = 0; k < residual_q.dates.size(); ++k) {
    const auto it = std::lower_bound(xi_dates.begin(), xi_dates.end(), residual_q.dates[k]);
    if (it == xi_dates.end() || *it != residual_q.dates[k] || it == xi_dates.begin()) {
      throw Error(Errc::DateMisalignment, "forecast date " + residual_q.dates[k].iso() +
                                              " has no previous projection");
    }
    const double prev = xi[static_cast<std::size_t>(it - xi_dates.begin()) - 1];
    for (std::size_t a = 0; a < out.alphas.size(); ++a) out.values(k, a) += model->beta * prev;
  }
  return out;
}

std::string_view to_string(Reconstruction r) {
  return r == Reconstruction::Multiplicative ? "multiplicative" : "additive-paper";
}

Reconstruction parse_reconstruction(std::string_view text) {
  if (text == "multiplicative") return Reconstruction::Multiplicative;
  if (text == "additive-paper") return Reconstruction::AdditivePaper;
  throw Error(Errc::ConfigError, "unknown reconstruction '" + std::string(text) + "'");
}

void FhsConfig::validate() const {
  if (window < 1) throw Error(Errc::ConfigError, "fhs.L must be positive");
  if (alphas.empty()) throw Error(Errc::ConfigError, "fhs.alphas is empty");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw Error(Errc::ConfigError, "every alpha must lie in (0,1)");
  for (int s : signs)
    if (s != 1 && s != -1) throw Error(Errc::ConfigError, "signs must be +1 or -1");
  ewma.validate();
}

FilteredSeries filter_series(std::span<const double> xi, bool use_ar, const EwmaParams& ewma,
                             std::string series_id) {
  FilteredSeries f;
  if (use_ar) {
    f.ar = fit_ar1(xi, std::move(series_id));
    f.residual_offset = 1;
  }
  f.residuals = ar_residuals(xi, f.ar);
  f.vol_offset = ewma.window;
  f.sigma = ewma_vol(f.residuals, ewma);
  f.devolatized.resize(f.sigma.size());
  for (std::size_t k = 0; k < f.sigma.size(); ++k)
    f.devolatized[k] = f.residuals[f.vol_offset + k] / f.sigma[k];
  return f;
}

ModeForecast forecast_mode(std::span<const Date> dates, std::span<const double> xi,
                           std::size_t mode, const FhsConfig& config) {
  config.validate();
  if (dates.size() != xi.size()) throw Error(Errc::ShapeMismatch, "xi values and dates differ");
  const bool use_ar = config.use_ar_for(mode);
  const auto f = filter_series(xi, use_ar, config.ewma, "xi_" + std::to_string(mode + 1));

  const Matrix eq = forecast_residual_quantile(f.devolatized, f.sigma, config.window, config.alphas);

  ModeForecast mf;
  mf.mode = mode;
  mf.ar = f.ar;
  mf.eps_q.alphas = config.alphas;
  mf.eps_q.values = eq;
  for (std::size_t k = 0; k < eq.rows(); ++k) {
    const std::size_t res_pos = f.vol_offset + config.window + k;
    const std::size_t xi_pos = f.residual_offset + res_pos;
    mf.dates.push_back(dates[xi_pos]);
    mf.xi.push_back(xi[xi_pos]);
    mf.eps.push_back(f.residuals[res_pos]);
    mf.sigma.push_back(f.sigma[config.window + k]);
  }
  mf.eps_q.dates = mf.dates;
  mf.xi_q = forecast_xi_quantile(dates, xi, mf.ar, mf.eps_q);
  return mf;
}

std::vector<double> extreme_log_return(const KLModel& model, std::span<const double> xi_hat) {
  auto u = reconstruct(model, xi_hat, xi_hat.size());
  if (!model.mean_function.empty()) {
    for (std::size_t j = 0; j < u.size(); ++j) u[j] += model.mean_function[j];
  }
  return u;
}

std::vector<double> extreme_field(const KLModel& model, std::span<const double> xi_hat,
                                  std::span<const double> last_smile, Reconstruction mode) {
  if (last_smile.empty()) throw Error(Errc::MissingLastSmile, "no previous smile to shock");
  if (last_smile.size() != model.grid.size()) {
    throw Error(Errc::ShapeMismatch, "previous smile does not match the model grid");
  }
  const auto u = extreme_log_return(model, xi_hat);
  std::vector<double> out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    out[j] = mode == Reconstruction::Multiplicative ? last_smile[j] * std::exp(u[j])
                                                    : last_smile[j] + std::exp(u[j]);
  }
  return out;
}

std::vector<double> scenario_levels(double alpha, std::size_t n_modes, const FhsConfig& config) {
  std::vector<double> levels(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i)
    levels[i] = config.sign_for(i) > 0 ? alpha : 1.0 - alpha;
  return levels;
}

double var_pnl(const PricingFn& pricer, double forward, double strike, double expiry,
               std::span<const double> moneyness, std::span<const double> extreme_smile,
               std::span<const double> last_smile) {
  if (last_smile.empty()) throw Error(Errc::MissingLastSmile, "no previous smile");
  const double m = strike - forward;
  const double shocked = interpolate_smile(moneyness, extreme_smile, m);
  const double base = interpolate_smile(moneyness, last_smile, m);
  return pricer(forward, strike, shocked, expiry) - pricer(forward, strike, base, expiry);
}

}  // namespace smilerisk
