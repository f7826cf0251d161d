#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace smilerisk {

// Normal-model (Bachelier) swaption pricing with the annuity normalized to
// one. A payer swaption is a call on the forward swap rate; rates and vols
// are absolute decimals and may be negative (rates) or zero (vols).

double normal_pdf(double x);
/// Φ(x) = erfc(−x/√2)/2 via the C library erfc.
double normal_cdf(double x);

/// Payer (call) price. σ√T = 0 gives the intrinsic value max(f−κ, 0).
/// Throws Error(NegativeVol) for σ < 0, Error(NonPositiveExpiry) for T ≤ 0.
double price(double forward, double strike, double vol, double expiry);

/// ∂price/∂σ = √T·φ(d).
double vega(double forward, double strike, double vol, double expiry);

struct SwaptionSpec {
  double expiry = 1.0;  // years
  double tenor = 1.0;   // years; metadata, annuity normalized to 1
  bool payer = true;
};

/// Payer price, or the receiver price by put-call parity.
double swaption_price(const SwaptionSpec& spec, double forward, double strike, double vol);

/// Linear interpolation in moneyness with flat extrapolation past the ends.
double interpolate_smile(std::span<const double> moneyness, std::span<const double> vols,
                         double m);

struct PriceCurve {
  std::vector<double> strikes;  // strictly increasing
  std::vector<double> prices;
};

/// Prices every strike with σ(κ) = smile(κ − f).
PriceCurve price_curve(double forward, std::span<const double> strikes,
                       std::span<const double> moneyness, std::span<const double> smile,
                       double expiry);

enum class ViolationKind { Monotonicity, Convexity };
std::string_view to_string(ViolationKind kind);

struct Violation {
  std::size_t index;  // left strike for monotonicity, middle strike for convexity
  ViolationKind kind;
};

struct ArbitrageReport {
  bool monotone_ok = true;
  bool convex_ok = true;
  std::vector<Violation> violations;

  bool ok() const { return monotone_ok && convex_ok; }
};

/// Price must not increase in strike (P[i+1] − P[i] ≤ tol) and every
/// three-strike butterfly must be worth at least −tol, both in price units.
ArbitrageReport check_no_arbitrage(const PriceCurve& curve, double tol = 1e-10);

}  // namespace smilerisk
