#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smilerisk/date.hpp"
#include "smilerisk/kldecomp.hpp"
#include "smilerisk/linalg.hpp"

namespace smilerisk {

// Filtered historical simulation on KL projection series: an optional AR(1)
// conditional mean, EWMA conditional volatility, rolling empirical
// quantiles of the devolatized residuals, and revolatization.

/// Sample autocorrelations for lags 0..max_lag (index 0 is 1). Needs
/// length > max_lag + 1.
std::vector<double> acf(std::span<const double> x, std::size_t max_lag);
/// Partial autocorrelations for lags 0..max_lag via Durbin-Levinson
/// (index 0 is 1 by convention).
std::vector<double> pacf(std::span<const double> x, std::size_t max_lag);

struct ArModel {
  double beta = 0.0;
  std::string fitted_on;
};

/// No-intercept least squares β = Σ x(t)x(t−1) / Σ x(t−1)². Needs ≥ 10
/// points; throws Error(NonStationaryFit) when |β| ≥ 1.
ArModel fit_ar1(std::span<const double> x, std::string series_id = {});

/// ε(t) = x(t) − β·x(t−1) from the second observation on; without a model
/// the series is returned unchanged.
std::vector<double> ar_residuals(std::span<const double> x, const std::optional<ArModel>& model);

struct EwmaParams {
  double theta = 0.9;
  std::size_t window = 60;  // W

  void validate() const;
};

/// σ²(t) = θ·σ²(t−1) + (1−θ)·x²(t−1)
inline double ewma_step(double prev_variance, double prev_x, double theta) {
  return theta * prev_variance + (1.0 - theta) * prev_x * prev_x;
}

/// Conditional variances for positions W..n−1 (0-based) of `x`: the first is
/// the mean of x² over the first W points, then the recursion. Every value is
/// floored at 1e-12·seed (or the smallest normal double if the seed is 0).
std::vector<double> ewma_variance(std::span<const double> x, const EwmaParams& params);
/// Square roots of ewma_variance.
std::vector<double> ewma_vol(std::span<const double> x, const EwmaParams& params);

/// α-quantile of an ascending sample: plotting position p = α(L+1), linear
/// interpolation between order statistics, clamped to the extremes.
double empirical_quantile(std::span<const double> sorted, double alpha);

/// Forecast for position L+k uses x[k..k+L−1]; output has n−L entries.
/// Throws Error(InsufficientHistory) when n ≤ L.
std::vector<double> rolling_quantile(std::span<const double> x, std::size_t window, double alpha);
/// Same, several levels at once; rows are forecast positions, cols are alphas.
Matrix rolling_quantiles(std::span<const double> x, std::size_t window,
                         std::span<const double> alphas);

struct QuantileSeries {
  std::vector<Date> dates;
  std::vector<double> alphas;
  Matrix values;  // rows = dates, cols = alphas

  std::size_t column(double alpha) const;  // throws Error(InvalidArgument)
};

/// σ(t)·F̂⁻¹_t(α) where F̂_t is the empirical distribution of the L previous
/// devolatized residuals. `devolatized` and `sigma` are aligned; output row k
/// belongs to position L+k.
Matrix forecast_residual_quantile(std::span<const double> devolatized,
                                  std::span<const double> sigma, std::size_t window,
                                  std::span<const double> alphas);

/// ξ̂(t) = β·ξ(t−1) + ε̂(t) for every date of `residual_q`; with no AR model
/// the residual quantile is returned. Throws Error(DateMisalignment) when a
/// forecast date has no predecessor in `xi_dates`.
QuantileSeries forecast_xi_quantile(std::span<const Date> xi_dates, std::span<const double> xi,
                                    const std::optional<ArModel>& model,
                                    const QuantileSeries& residual_q);

enum class Reconstruction { Multiplicative, AdditivePaper };
std::string_view to_string(Reconstruction r);
Reconstruction parse_reconstruction(std::string_view text);

struct FhsConfig {
  std::size_t window = 250;  // L
  std::vector<double> alphas{0.01, 0.99};
  EwmaParams ewma;
  std::vector<bool> use_ar{true, false, false};  // modes beyond the list: off
  std::vector<int> signs;                        // +1 same tail, −1 opposite; default +1
  Reconstruction reconstruction = Reconstruction::Multiplicative;

  bool use_ar_for(std::size_t mode) const { return mode < use_ar.size() && use_ar[mode]; }
  int sign_for(std::size_t mode) const { return mode < signs.size() ? signs[mode] : 1; }
  void validate() const;
};

/// The filtration chain for one projection series.
struct FilteredSeries {
  std::optional<ArModel> ar;
  std::size_t residual_offset = 0;  // position in ξ of residuals[0]
  std::vector<double> residuals;
  std::size_t vol_offset = 0;       // position in residuals of sigma[0] (= W)
  std::vector<double> sigma;
  std::vector<double> devolatized;  // residuals[vol_offset + k] / sigma[k]
};

FilteredSeries filter_series(std::span<const double> xi, bool use_ar, const EwmaParams& ewma,
                             std::string series_id = {});

/// Per-date realized values and forecasts for one mode.
struct ModeForecast {
  std::size_t mode = 0;
  std::optional<ArModel> ar;
  std::vector<Date> dates;
  std::vector<double> xi;      // realized ξ(t)
  std::vector<double> eps;     // realized ε(t)
  std::vector<double> sigma;   // σ(t)
  QuantileSeries eps_q;        // ε̂(α)(t)
  QuantileSeries xi_q;         // ξ̂(α)(t)
};

ModeForecast forecast_mode(std::span<const Date> dates, std::span<const double> xi,
                           std::size_t mode, const FhsConfig& config);

/// û(x) = Σᵢ √λᵢ·ξ̂ᵢ·eᵢ(x) + ū(x) over the first xi_hat.size() modes.
std::vector<double> extreme_log_return(const KLModel& model, std::span<const double> xi_hat);

/// Î(t,x) = I(t−1,x)·exp(û(x)) (or I + exp(û) for the literal additive form).
/// Throws Error(MissingLastSmile) when `last_smile` is empty.
std::vector<double> extreme_field(const KLModel& model, std::span<const double> xi_hat,
                                  std::span<const double> last_smile,
                                  Reconstruction mode = Reconstruction::Multiplicative);

/// Per-mode quantile level for a combined scenario at target α: mode i uses
/// α when its sign is +1 and 1−α when it is −1.
std::vector<double> scenario_levels(double alpha, std::size_t n_modes, const FhsConfig& config);

using PricingFn = std::function<double(double forward, double strike, double vol, double expiry)>;

/// C(f, κ, Î(κ−f)) − C(f, κ, I(κ−f)) with the forward frozen at t−1. Smiles
/// are interpolated linearly in moneyness and clamped at the ends.
double var_pnl(const PricingFn& pricer, double forward, double strike, double expiry,
               std::span<const double> moneyness, std::span<const double> extreme_smile,
               std::span<const double> last_smile);

}  // namespace smilerisk
