#include "smilerisk/bachelier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smilerisk/error.hpp"
#include "smilerisk/format.hpp"

namespace smilerisk {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

void check_inputs(double vol, double expiry) {
  if (vol < 0.0 || std::isnan(vol)) {
    throw Error(Errc::NegativeVol, "vol " + format_number(vol) + " is negative");
  }
  if (!(expiry > 0.0)) {
    throw Error(Errc::NonPositiveExpiry, "expiry " + format_number(expiry) + " is not positive");
  }
}

}  // namespace

double price(double forward, double strike, double vol, double expiry) {
  check_inputs(vol, expiry);
  const double stdev = vol * std::sqrt(expiry);
  const double moneyness = forward - strike;
  if (stdev == 0.0) return std::max(moneyness, 0.0);
  const double d = moneyness / stdev;
  return moneyness * normal_cdf(d) + stdev * normal_pdf(d);
}

double vega(double forward, double strike, double vol, double expiry) {
  check_inputs(vol, expiry);
  const double stdev = vol * std::sqrt(expiry);
  if (stdev == 0.0) return forward == strike ? std::sqrt(expiry) * normal_pdf(0.0) : 0.0;
  return std::sqrt(expiry) * normal_pdf((forward - strike) / stdev);
}

double swaption_price(const SwaptionSpec& spec, double forward, double strike, double vol) {
  const double call = price(forward, strike, vol, spec.expiry);
  return spec.payer ? call : call - (forward - strike);
}

double interpolate_smile(std::span<const double> moneyness, std::span<const double> vols,
                         double m) {
  if (moneyness.empty() || moneyness.size() != vols.size()) {
    throw Error(Errc::ShapeMismatch, "smile grid and values differ in size");
  }
  if (m <= moneyness.front()) return vols.front();
  if (m >= moneyness.back()) return vols.back();
  const auto it = std::upper_bound(moneyness.begin(), moneyness.end(), m);
  const std::size_t hi = static_cast<std::size_t>(it - moneyness.begin());
  const std::size_t lo = hi - 1;
  const double t = (m - moneyness[lo]) / (moneyness[hi] - moneyness[lo]);
  return vols[lo] + t * (vols[hi] - vols[lo]);
}

PriceCurve price_curve(double forward, std::span<const double> strikes,
                       std::span<const double> moneyness, std::span<const double> smile,
                       double expiry) {
  for (std::size_t i = 1; i < strikes.size(); ++i) {
    if (!(strikes[i] > strikes[i - 1]))
      throw Error(Errc::InvalidArgument, "strikes must be strictly increasing");
  }
  PriceCurve curve;
  curve.strikes.assign(strikes.begin(), strikes.end());
  curve.prices.reserve(strikes.size());
  for (double k : strikes) {
    const double vol = interpolate_smile(moneyness, smile, k - forward);
    curve.prices.push_back(price(forward, k, vol, expiry));
  }
  return curve;
}

std::string_view to_string(ViolationKind kind) {
  return kind == ViolationKind::Monotonicity ? "monotonicity" : "convexity";
}

ArbitrageReport check_no_arbitrage(const PriceCurve& curve, double tol) {
  const auto& k = curve.strikes;
  const auto& p = curve.prices;
  if (k.size() != p.size()) throw Error(Errc::ShapeMismatch, "strikes and prices differ in size");
  if (k.size() < 3) throw Error(Errc::TooFewStrikes, "no-arbitrage check needs >= 3 strikes");

  ArbitrageReport report;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    if (p[i + 1] - p[i] > tol) {
      report.monotone_ok = false;
      report.violations.push_back({i, ViolationKind::Monotonicity});
    }
  }
  for (std::size_t i = 1; i + 1 < k.size(); ++i) {
    // Long w calls at k[i-1], long 1−w at k[i+1], short one at k[i].
    const double w = (k[i + 1] - k[i]) / (k[i + 1] - k[i - 1]);
    const double butterfly = w * p[i - 1] + (1.0 - w) * p[i + 1] - p[i];
    if (butterfly < -tol) {
      report.convex_ok = false;
      report.violations.push_back({i, ViolationKind::Convexity});
    }
  }
  return report;
}

}  // namespace smilerisk
