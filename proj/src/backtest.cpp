#include "smilerisk/backtest.hpp"

#include <algorithm>
#include <cmath>

#include "smilerisk/error.hpp"
#include "smilerisk/format.hpp"

namespace smilerisk {

Tail tail_for(double alpha) { return alpha < 0.5 ? Tail::Lower : Tail::Upper; }

std::string_view to_string(Tail tail) { return tail == Tail::Lower ? "lower" : "upper"; }

HitSequence hit_sequence(std::span<const Date> realized_dates, std::span<const double> realized,
                         std::span<const Date> forecast_dates, std::span<const double> forecast,
                         double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(Errc::InvalidArgument, "alpha must lie in (0,1)");
  if (realized.size() != realized_dates.size() || forecast.size() != forecast_dates.size())
    throw Error(Errc::ShapeMismatch, "values and dates differ in length");
  if (!std::equal(realized_dates.begin(), realized_dates.end(), forecast_dates.begin(),
                  forecast_dates.end())) {
    throw Error(Errc::DateMisalignment, "realized and forecast dates differ");
  }
  HitSequence h;
  h.dates.assign(realized_dates.begin(), realized_dates.end());
  h.alpha = alpha;
  h.tail = tail_for(alpha);
  h.hits.reserve(realized.size());
  for (std::size_t i = 0; i < realized.size(); ++i) {
    const bool hit = h.tail == Tail::Lower ? realized[i] <= forecast[i] : realized[i] >= forecast[i];
    h.hits.push_back(hit ? 1 : 0);
  }
  return h;
}

TransitionCounts transition_counts(std::span<const std::uint8_t> hits) {
  TransitionCounts c;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] > 1) throw Error(Errc::InvalidArgument, "hit values must be 0 or 1");
    (hits[i] ? c.t1 : c.t0)++;
    if (i == 0) continue;
    const int from = hits[i - 1], to = hits[i];
    if (from == 0 && to == 0) ++c.t00;
    else if (from == 0) ++c.t01;
    else if (to == 0) ++c.t10;
    else ++c.t11;
  }
  return c;
}

double chi2_sf1(double x) {
  if (x < 0.0 || std::isnan(x)) {
    throw Error(Errc::NegativeStatistic, "statistic " + format_number(x) + " is negative");
  }
  return std::erfc(std::sqrt(0.5 * x));
}

namespace {

// n·log(p) with 0·log(0) = 0.
double xlogy(double n, double p) { return n == 0.0 ? 0.0 : n * std::log(p); }

double as_double(std::size_t n) { return static_cast<double>(n); }

}  // namespace

LikelihoodRatio kupiec_pof(std::size_t t0, std::size_t t1, double level) {
  if (t0 + t1 == 0) throw Error(Errc::EmptySequence, "Kupiec test on an empty sequence");
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::InvalidArgument, "level must lie in (0,1)");
  const double n0 = as_double(t0), n1 = as_double(t1);
  const double alpha_hat = n1 / (n0 + n1);
  const double null_ll = xlogy(n0, 1.0 - level) + xlogy(n1, level);
  const double alt_ll = xlogy(n0, 1.0 - alpha_hat) + xlogy(n1, alpha_hat);
  const double stat = std::max(0.0, -2.0 * (null_ll - alt_ll));
  return {stat, chi2_sf1(stat)};
}

LikelihoodRatio kupiec_pof(const HitSequence& h) {
  if (h.hits.size() < 2) throw Error(Errc::EmptySequence, "Kupiec test needs >= 2 observations");
  const auto c = transition_counts(h.hits);
  return kupiec_pof(c.t0, c.t1, h.effective_level());
}

IndependenceTest christoffersen_ind(const TransitionCounts& c) {
  const double n00 = as_double(c.t00), n01 = as_double(c.t01);
  const double n10 = as_double(c.t10), n11 = as_double(c.t11);
  const double total = n00 + n01 + n10 + n11;
  if (total == 0.0) throw Error(Errc::EmptySequence, "Christoffersen test without transitions");

  const double pooled = (n01 + n11) / total;
  const double null_ll = xlogy(n00 + n10, 1.0 - pooled) + xlogy(n01 + n11, pooled);

  // A transition row with zero total contributes nothing.
  double alt_ll = 0.0;
  if (n00 + n01 > 0.0) {
    const double a01 = n01 / (n00 + n01);
    alt_ll += xlogy(n00, 1.0 - a01) + xlogy(n01, a01);
  }
  if (n10 + n11 > 0.0) {
    const double a11 = n11 / (n10 + n11);
    alt_ll += xlogy(n10, 1.0 - a11) + xlogy(n11, a11);
  }
  const double stat = std::max(0.0, -2.0 * (null_ll - alt_ll));
  return {stat, chi2_sf1(stat), c};
}

IndependenceTest christoffersen_ind(const HitSequence& h) {
  if (h.hits.size() < 3)
    throw Error(Errc::EmptySequence, "Christoffersen test needs >= 3 observations");
  return christoffersen_ind(transition_counts(h.hits));
}

BacktestReport run_backtest(const HitSequence& h) {
  BacktestReport r;
  r.tail = h.tail;
  r.alpha = h.alpha;
  const auto pof = kupiec_pof(h);
  const auto ind = christoffersen_ind(h);
  r.counts = ind.counts;
  r.alpha_hat = as_double(r.counts.t1) / as_double(r.counts.t0 + r.counts.t1);
  r.pof_stat = pof.stat;
  r.pof_pvalue = pof.pvalue;
  r.ind_stat = ind.stat;
  r.ind_pvalue = ind.pvalue;
  return r;
}

}  // namespace smilerisk
