#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "smilerisk/date.hpp"

namespace smilerisk {

enum class Tail { Lower, Upper };

/// Lower tail for α < 0.5, upper tail otherwise.
Tail tail_for(double alpha);
std::string_view to_string(Tail tail);

struct HitSequence {
  std::vector<Date> dates;
  std::vector<std::uint8_t> hits;  // 0 or 1
  Tail tail = Tail::Lower;
  double alpha = 0.01;

  /// Coverage level under the null: α for the lower tail, 1−α for the upper.
  double effective_level() const { return tail == Tail::Lower ? alpha : 1.0 - alpha; }
};

/// Lower tail: hit when realized ≤ forecast. Upper tail: hit when
/// realized ≥ forecast. Throws Error(DateMisalignment) if the two date lists
/// differ.
HitSequence hit_sequence(std::span<const Date> realized_dates, std::span<const double> realized,
                         std::span<const Date> forecast_dates, std::span<const double> forecast,
                         double alpha);

struct TransitionCounts {
  std::size_t t00 = 0, t01 = 0, t10 = 0, t11 = 0;
  std::size_t t0 = 0, t1 = 0;  // number of 0s and 1s in the sequence

  friend bool operator==(const TransitionCounts&, const TransitionCounts&) = default;
};

TransitionCounts transition_counts(std::span<const std::uint8_t> hits);

struct LikelihoodRatio {
  double stat = 0.0;
  double pvalue = 1.0;
};

/// χ²₁ survival function, sf(x) = erfc(√(x/2)).
double chi2_sf1(double x);

/// Kupiec proportion-of-failures test from counts of non-hits and hits.
LikelihoodRatio kupiec_pof(std::size_t t0, std::size_t t1, double level);
LikelihoodRatio kupiec_pof(const HitSequence& h);

struct IndependenceTest {
  double stat = 0.0;
  double pvalue = 1.0;
  TransitionCounts counts;
};

/// Christoffersen first-order Markov independence test.
IndependenceTest christoffersen_ind(const TransitionCounts& counts);
IndependenceTest christoffersen_ind(const HitSequence& h);

struct BacktestReport {
  Tail tail = Tail::Lower;
  double alpha = 0.0;
  double alpha_hat = 0.0;
  TransitionCounts counts;
  double pof_stat = 0.0, pof_pvalue = 1.0;
  double ind_stat = 0.0, ind_pvalue = 1.0;
};

BacktestReport run_backtest(const HitSequence& h);

}  // namespace smilerisk
