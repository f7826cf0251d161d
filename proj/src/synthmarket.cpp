#include "smilerisk/synthmarket.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "smilerisk/error.hpp"
#include "smilerisk/kldecomp.hpp"

namespace smilerisk {

std::vector<double> SynthSpec::true_lambdas() const {
  std::vector<double> out;
  for (double l : lambdas) out.push_back(lambda_scale * l);
  return out;
}

void SynthSpec::validate() const {
  if (lambdas.empty()) throw Error(Errc::InvalidArgument, "synthetic market needs at least one mode");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw Error(Errc::InvalidArgument, "lambdas must be positive");
    if (i > 0 && lambdas[i] > lambdas[i - 1])
      throw Error(Errc::InvalidArgument, "lambdas must be descending");
  }
  if (!(lambda_scale > 0.0)) throw Error(Errc::InvalidArgument, "lambda_scale must be positive");
  for (double b : ar_betas)
    if (!(std::abs(b) < 1.0)) throw Error(Errc::InvalidArgument, "AR betas must lie in (-1,1)");
  if (!(vol_cluster >= 0.0 && vol_cluster < 1.0))
    throw Error(Errc::InvalidArgument, "vol_cluster must lie in [0,1)");
  if (!(arch_share >= 0.0 && arch_share <= 1.0))
    throw Error(Errc::InvalidArgument, "arch_share must lie in [0,1]");
  if (n_dates < 3) throw Error(Errc::InvalidArgument, "synthetic market needs >= 3 dates");
  const bool two_d = axis == Axis::ExpiryTenor;
  if (grid.dims() != (two_d ? 2u : 1u)) throw Error(Errc::InvalidArgument, "grid rank does not match axis");
  if (lambdas.size() > grid.size()) throw Error(Errc::InvalidArgument, "more modes than grid points");
  if (!base_smile.empty()) {
    if (base_smile.size() != grid.size()) throw Error(Errc::ShapeMismatch, "base smile size != grid size");
    for (double v : base_smile)
      if (!(v > 0.0)) throw Error(Errc::NonPositiveVol, "base smile must be positive");
  }
}

std::vector<double> uniform_points(double a, double b, std::size_t count) {
  if (count < 2 || !(b > a)) throw Error(Errc::InvalidArgument, "uniform grid needs a < b and >= 2 points");
  std::vector<double> p(count);
  for (std::size_t i = 0; i < count; ++i)
    p[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  p.back() = b;
  return p;
}

SynthSpec default_synth_spec() {
  SynthSpec s;
  s.axis = Axis::Moneyness;
  s.grid = make_grid_1d("moneyness", "decimal", uniform_points(-0.02, 0.02, 17));
  return s;
}

std::vector<double> default_base_smile(const Grid& grid, Axis axis) {
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto p = grid.point(j);
    if (axis == Axis::Moneyness) {
      out[j] = 0.0070 * (1.0 - 2.0 * p[0] + 400.0 * p[0] * p[0]);
    } else if (axis == Axis::ExpiryTenor) {
      out[j] = 0.0060 * (1.0 + 0.4 * std::exp(-p[0] / 5.0)) * (1.0 + 0.2 * std::exp(-p[1] / 5.0));
    } else {
      out[j] = 0.0060 * (1.0 + 0.4 * std::exp(-p[0] / 5.0));
    }
  }
  return out;
}

Matrix make_orthonormal_modes(const Grid& grid, std::size_t r) {
  if (r == 0 || r > grid.size()) throw Error(Errc::RankDeficiency, "mode count exceeds grid size");
  const auto w = quadrature_weights(grid);
  const std::size_t np = grid.size();
  const Domain domain = Domain::of(grid);

  // Reference coordinates in [−1,1] keep the monomials well scaled.
  std::vector<std::vector<double>> z(np);
  for (std::size_t j = 0; j < np; ++j) {
    const auto p = grid.point(j);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const auto [a, b] = domain.bounds[k];
      z[j].push_back(2.0 * (p[k] - a) / (b - a) - 1.0);
    }
  }

  // Exponent tuples in graded order: 1, x, y, x², xy, y², …
  std::vector<std::vector<int>> exponents;
  const std::size_t dims = grid.dims();
  for (int total = 0; exponents.size() < 8 * r + 8 && total < 64; ++total) {
    if (dims == 1) {
      exponents.push_back({total});
    } else {
      for (int i = total; i >= 0; --i) exponents.push_back({i, total - i});
    }
  }

  auto dot = [&](const std::vector<double>& f, const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t j = 0; j < np; ++j) s += w[j] * f[j] * g[j];
    return s;
  };

  std::vector<std::vector<double>> basis;
  for (const auto& ex : exponents) {
    if (basis.size() == r) break;
    std::vector<double> v(np, 1.0);
    for (std::size_t j = 0; j < np; ++j)
      for (std::size_t k = 0; k < dims; ++k) v[j] *= std::pow(z[j][k], ex[k]);
    const double norm0 = std::sqrt(dot(v, v));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = dot(v, q);
        for (std::size_t j = 0; j < np; ++j) v[j] -= c * q[j];
      }
    }
    const double norm = std::sqrt(dot(v, v));
    if (norm <= 1e-8 * norm0) continue;  // dependent on the lattice
    for (auto& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  if (basis.size() < r) {
    throw Error(Errc::RankDeficiency, "grid supports only " + std::to_string(basis.size()) +
                                          " independent polynomial modes");
  }
  Matrix modes(np, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < np; ++j) modes(j, i) = basis[i][j];
  return modes;
}

Matrix simulate_projections(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_dates - 1;
  const std::size_t r = spec.n_modes();
  Matrix xi(n, r);
  for (std::size_t i = 0; i < r; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, 1.0);

    const double beta = spec.beta_for(i);
    const double v = spec.vol_cluster;
    const double a = spec.arch_share;
    double var = 1.0;
    double x = 0.0;
    for (std::size_t t = 0; t < spec.burn_in + n; ++t) {
      const double shock = std::sqrt(var) * normal(engine);
      x = beta * x + shock;
      var = (1.0 - v) + v * ((1.0 - a) * var + a * shock * shock);
      if (t >= spec.burn_in) xi(t - spec.burn_in, i) = x;
    }

    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) mean += xi(t, i);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t t = 0; t < n; ++t) ss += (xi(t, i) - mean) * (xi(t, i) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    for (std::size_t t = 0; t < n; ++t) xi(t, i) /= sd;
  }
  return xi;
}

std::vector<Date> business_days(Date start, std::size_t count) {
  std::vector<Date> out;
  out.reserve(count);
  Date d = start;
  while (out.size() < count) {
    const std::chrono::weekday wd{d.days()};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
    d = d.plus_days(1);
  }
  return out;
}

VolCubeSeries synthesize_cube(const SynthSpec& spec, const Matrix& modes, const Matrix& xi) {
  spec.validate();
  const std::size_t np = spec.grid.size();
  const std::size_t r = spec.n_modes();
  if (modes.rows() != np || modes.cols() != r || xi.cols() != r || xi.rows() + 1 != spec.n_dates) {
    throw Error(Errc::ShapeMismatch, "modes or projections do not match the synthetic spec");
  }
  const auto base = spec.base_smile.empty() ? default_base_smile(spec.grid, spec.axis) : spec.base_smile;
  const auto lambdas = spec.true_lambdas();

  std::vector<double> amp(r);
  for (std::size_t i = 0; i < r; ++i) amp[i] = std::sqrt(lambdas[i]);

  // Field values per date in grid order; shocks are accumulated in log space
  // relative to the base smile.
  Matrix field(spec.n_dates, np);
  std::vector<double> log_level(np, 0.0);
  for (std::size_t j = 0; j < np; ++j) field(0, j) = base[j];
  for (std::size_t t = 1; t < spec.n_dates; ++t) {
    for (std::size_t j = 0; j < np; ++j) {
      double u = 0.0;
      for (std::size_t i = 0; i < r; ++i) u += amp[i] * xi(t - 1, i) * modes(j, i);
      log_level[j] += u;
      field(t, j) = base[j] * std::exp(log_level[j]);
    }
  }

  std::vector<double> mg{spec.fixed_moneyness}, eg{spec.fixed_expiry}, ng{spec.fixed_tenor};
  switch (spec.axis) {
    case Axis::Moneyness: mg = spec.grid.axes[0].points; break;
    case Axis::Expiry: eg = spec.grid.axes[0].points; break;
    case Axis::Tenor: ng = spec.grid.axes[0].points; break;
    case Axis::ExpiryTenor:
      eg = spec.grid.axes[0].points;
      ng = spec.grid.axes[1].points;
      break;
  }
  const std::size_t nm = mg.size(), ne = eg.size(), nn = ng.size();
  std::vector<double> vols(spec.n_dates * nm * ne * nn);
  for (std::size_t t = 0; t < spec.n_dates; ++t)
    for (std::size_t m = 0; m < nm; ++m)
      for (std::size_t e = 0; e < ne; ++e)
        for (std::size_t n = 0; n < nn; ++n) {
          std::size_t j = 0;
          switch (spec.axis) {
            case Axis::Moneyness: j = m; break;
            case Axis::Expiry: j = e; break;
            case Axis::Tenor: j = n; break;
            case Axis::ExpiryTenor: j = e * nn + n; break;
          }
          vols[((t * nm + m) * ne + e) * nn + n] = field(t, j);
        }

  std::optional<std::vector<double>> forwards;
  if (spec.forward) forwards = std::vector<double>(spec.n_dates * ne * nn, *spec.forward);
  return VolCubeSeries(business_days(spec.start, spec.n_dates), std::move(mg), std::move(eg),
                       std::move(ng), std::move(vols), std::move(forwards));
}

}  // namespace smilerisk
