#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "smilerisk/date.hpp"
#include "smilerisk/linalg.hpp"
#include "smilerisk/volgrid.hpp"

namespace smilerisk {

// Seeded synthetic implied-vol markets with a known KL ground truth:
//   log I(t,x) = log I(t−1,x) + Σᵢ √λᵢ·ξᵢ(t)·eᵢ(x),  I(0,·) = base smile,
// where eᵢ are trapezoid-orthonormal polynomials on the grid and each ξᵢ is
// an AR(1) with persistent conditional variance, rescaled to unit variance.

struct SynthSpec {
  Axis axis = Axis::Moneyness;
  Grid grid;                           // 1-D, or 2-D (expiry × tenor) for ExpiryTenor
  std::vector<double> lambdas{9.0, 0.9, 0.1};
  double lambda_scale = 5e-8;         // true eigenvalues are lambda_scale·lambdas
  std::vector<double> ar_betas{0.18};  // per mode, missing entries are 0
  double vol_cluster = 0.98;           // variance persistence in [0,1)
  double arch_share = 0.1;             // weight of the last squared shock
  std::vector<double> base_smile;      // empty: default_base_smile
  std::size_t n_dates = 2500;
  std::uint64_t seed = 42;
  std::size_t burn_in = 250;
  Date start{2007, 1, 2};
  double fixed_moneyness = 0.0;
  double fixed_expiry = 10.0;
  double fixed_tenor = 10.0;
  std::optional<double> forward = 0.03;

  std::size_t n_modes() const { return lambdas.size(); }
  std::vector<double> true_lambdas() const;
  double beta_for(std::size_t mode) const {
    return mode < ar_betas.size() ? ar_betas[mode] : 0.0;
  }
  void validate() const;
};

/// Uniform points a, a+h, …, b.
std::vector<double> uniform_points(double a, double b, std::size_t count);

/// Moneyness smile in [−2%, 2%] with 17 points, 10Y×10Y, λ = (9, 0.9, 0.1)·5e-8.
SynthSpec default_synth_spec();

/// A convex, positive smile (moneyness) or a decaying term structure
/// (expiry/tenor axes); product form on 2-D lattices.
std::vector<double> default_base_smile(const Grid& grid, Axis axis);

/// Gram-Schmidt on monomials under the trapezoid inner product; rows are grid
/// points, columns are modes. Throws Error(RankDeficiency) if the grid cannot
/// carry r independent polynomials.
Matrix make_orthonormal_modes(const Grid& grid, std::size_t r);

/// (n_dates − 1) × r unit-variance projection series.
Matrix simulate_projections(const SynthSpec& spec);

/// Business-day dates (Mon–Fri) starting at spec.start.
std::vector<Date> business_days(Date start, std::size_t count);

VolCubeSeries synthesize_cube(const SynthSpec& spec, const Matrix& modes, const Matrix& xi);

}  // namespace smilerisk
