// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "smilerisk/bachelier.hpp"
#include "smilerisk/backtest.hpp"
#include "smilerisk/config.hpp"
#include "smilerisk/fhs.hpp"
#include "smilerisk/kldecomp.hpp"
#include "smilerisk/pipeline.hpp"
#include "smilerisk/synthmarket.hpp"

using namespace smilerisk;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail, double seconds) {
  std::printf("%s criterion %d: %s [%.2fs]\n", ok ? "PASS" : "FAIL", id, detail.c_str(), seconds);
  if (!ok) ++failures;
}

template <class F>
void criterion(int id, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, ok, detail, s);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// L² distance with h flipped to the sign of f.
double l2_distance(const Grid& g, const std::vector<double>& f, const std::vector<double>& h) {
  const double s = inner_product(g, f, h) < 0.0 ? -1.0 : 1.0;
  std::vector<double> d(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) d[j] = (f[j] - s * h[j]) * (f[j] - s * h[j]);
  return std::sqrt(integrate(g, d));
}

double corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i] / n, mb += b[i] / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

ReturnField synthetic_field(const SynthSpec& spec, Matrix* modes_out = nullptr) {
  const Matrix modes = make_orthonormal_modes(spec.grid, spec.n_modes());
  const auto cube = synthesize_cube(spec, modes, simulate_projections(spec));
  SliceSpec s;
  s.axis = spec.axis;
  s.moneyness = spec.fixed_moneyness;
  s.expiry = spec.fixed_expiry;
  s.tenor = spec.fixed_tenor;
  if (modes_out) *modes_out = modes;
  return center(log_returns(extract_slice(cube, s)));
}

// E[(f + σ√T·Z − κ)⁺] by composite Simpson from the kink to +12 standard deviations.
double integrated_price(double f, double k, double vol, double t) {
  const double s = vol * std::sqrt(t);
  const double z0 = (k - f) / s;
  const double hi = std::max(z0, 0.0) + 12.0;
  const std::size_t n = 100000;
  const double h = (hi - z0) / static_cast<double>(n);
  auto g = [&](double z) { return (f + s * z - k) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
  double sum = g(z0) + g(hi);
  for (std::size_t i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(z0 + h * static_cast<double>(i));
  return sum * h / 3.0;
}

// The 2000-date backtest market shared by criteria 5 to 7.
struct Market {
  PipelineConfig config;
  VolCubeSeries cube;
  Analysis analysis;
  VarForecast forecast;
};

const Market& market() {
  static const Market m = [] {
    PipelineConfig c;
    c.synth.n_dates = 2312;
    c.synth.seed = 42;
    c.slice.axis = Axis::Moneyness;
    c.slice.expiry = c.synth.fixed_expiry;
    c.slice.tenor = c.synth.fixed_tenor;
    const Matrix modes = make_orthonormal_modes(c.synth.grid, c.synth.n_modes());
    VolCubeSeries cube = synthesize_cube(c.synth, modes, simulate_projections(c.synth));
    Analysis a = analyze(cube, c);
    VarForecast f = forecast_var(a, c.fhs);
    return Market{c, std::move(cube), std::move(a), std::move(f)};
  }();
  return m;
}

}  // namespace

int main() {
  criterion(1, [](std::string& d) {
    const auto a = christoffersen_ind(TransitionCounts{2226, 28, 28, 0, 0, 0});
    const auto b = christoffersen_ind(TransitionCounts{2233, 24, 24, 1, 0, 0});
    d = fmt("Christoffersen p = %.4f%% (target 40.42%%), %.4f%% (target 27.71%%)", 100 * a.pvalue,
            100 * b.pvalue);
    return std::abs(100 * a.pvalue - 40.42) <= 0.05 && std::abs(100 * b.pvalue - 27.71) <= 0.05;
  });

  criterion(2, [](std::string& d) {
    const auto a = kupiec_pof(2282 - 28, 28, 0.01);
    const auto b = kupiec_pof(2282 - 25, 25, 0.01);
    d = fmt("Kupiec p = %.4f%% (29.36%%), %.4f%% (65.30%%) with T = 2282", 100 * a.pvalue, 100 * b.pvalue);
    return std::abs(100 * a.pvalue - 29.36) <= 0.25 && std::abs(100 * b.pvalue - 65.30) <= 0.25;
  });

  criterion(3, [](std::string& d) {
    const SynthSpec spec = default_synth_spec();
    Matrix truth;
    const auto rf = synthetic_field(spec, &truth);
    const auto model = decompose(rf, default_basis(rf.field.grid), 3);
    const auto shares = explained_variance(model);
    const double target[] = {0.9, 0.09, 0.01};
    bool ok = true;
    double worst_share = 0.0, worst_l2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      worst_share = std::max(worst_share, std::abs(shares[i] - target[i]));
      worst_l2 = std::max(worst_l2, l2_distance(model.grid, model.modes[i].samples, truth.col(i)));
    }
    ok = worst_share <= 0.02 && worst_l2 < 0.05;
    d = fmt("shares (%.4f, %.4f, %.4f)", shares[0], shares[1], shares[2]) +
        fmt(", max share error %.4f, max L2 error %.4f", worst_share, worst_l2);
    return ok;
  });

  criterion(4, [](std::string& d) {
    double worst = 0.0;
    auto check = [&](const ReturnField& rf, const BasisSpec& basis, std::size_t r) {
      const auto model = decompose(rf, basis, r);
      const auto p = project(rf, model);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j)
          worst = std::max(worst, std::abs(corr(p.mode_series(i), p.mode_series(j))));
    };
    // Synthetic smile, synthetic surface, and unstructured heavy-tailed noise.
    const auto smile = synthetic_field(default_synth_spec());
    check(smile, default_basis(smile.field.grid), 3);
    SynthSpec surf = default_synth_spec();
    surf.axis = Axis::ExpiryTenor;
    surf.grid.axes = {{"expiry", "years", uniform_points(1, 10, 10)}, {"tenor", "years", uniform_points(1, 10, 10)}};
    surf.n_dates = 1000;
    const auto surface = synthetic_field(surf);
    check(surface, BasisSpec{{5, 5}}, 3);
    std::mt19937_64 rng(77);
    std::student_t_distribution<double> t3(3.0);
    const Grid g = make_grid_1d("m", "", {0.0, 0.1, 0.25, 0.3, 0.5, 0.65, 0.8, 1.0, 1.4});
    FieldSeries noise{std::vector<Date>(), g, Matrix(800, g.size())};
    noise.dates = business_days(Date{2010, 1, 4}, 800);
    for (std::size_t t = 0; t < 800; ++t)
      for (std::size_t j = 0; j < g.size(); ++j) noise.values(t, j) = t3(rng) * (1.0 + g.point(j)[0]);
    ReturnField nrf{noise, {}, false};
    check(center(nrf), BasisSpec{{7}}, 5);
    d = fmt("max |corr(xi_i, xi_j)| = %.3e over smile, surface and noise datasets", worst);
    return worst < 1e-4;
  });

  criterion(5, [](std::string& d) {
    const auto& m = market();
    const auto& xi = m.analysis.projections;
    double worst_devol = 0.0;
    std::size_t raw_outside = 0;
    bool ok = true;
    for (std::size_t i = 0; i < xi.xi.cols(); ++i) {
      const auto f = filter_series(xi.mode_series(i), m.config.fhs.use_ar_for(i), m.config.fhs.ewma);
      auto abs_acf = [](const std::vector<double>& x) {
        std::vector<double> a(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) a[k] = std::abs(x[k]);
        return acf(a, 20);
      };
      const auto dv = abs_acf(f.devolatized);
      const auto rw = abs_acf(f.residuals);
      const double band_dv = 3.0 / std::sqrt(static_cast<double>(f.devolatized.size()));
      const double band_rw = 3.0 / std::sqrt(static_cast<double>(f.residuals.size()));
      std::size_t outside = 0;
      for (std::size_t k = 1; k <= 20; ++k) {
        worst_devol = std::max(worst_devol, std::abs(dv[k]) / band_dv);
        if (std::abs(dv[k]) >= band_dv) ok = false;
        if (std::abs(rw[k]) >= band_rw) ++outside;
      }
      if (outside == 0) ok = false;
      raw_outside += outside;
    }
    d = fmt("max |acf(|eps/sigma|)| = %.3f of the 3/sqrt(T) band; %.0f raw lags outside (3 modes)",
            worst_devol, static_cast<double>(raw_outside));
    return ok;
  });

  criterion(6, [](std::string& d) {
    const auto& m = market();
    bool ok = true;
    std::string parts;
    for (const auto& mf : m.forecast.modes) {
      for (double alpha : {0.01, 0.99}) {
        const auto q = mf.eps_q.values.col(mf.eps_q.column(alpha));
        const auto h = hit_sequence(mf.dates, mf.eps, mf.dates, q, alpha);
        const auto r = run_backtest(h);
        const double freq = static_cast<double>(r.counts.t1) / static_cast<double>(h.hits.size());
        ok = ok && h.hits.size() >= 2000 && freq >= 0.005 && freq <= 0.017 && r.pof_pvalue > 0.05 &&
             r.ind_pvalue > 0.05;
        parts += fmt(" xi%.0f@%.2f:", static_cast<double>(mf.mode + 1), alpha) +
                 fmt("%.2f%%/p=%.2f/%.2f", 100 * freq, r.pof_pvalue, r.ind_pvalue);
      }
    }
    d = fmt("%.0f dates; hit rate/POF p/IND p per mode and tail:", static_cast<double>(m.forecast.dates.size())) + parts;
    return ok;
  });

  criterion(7, [](std::string& d) {
    const auto& m = market();
    const auto& grid = m.analysis.model.grid;
    const auto& mny = grid.axes[0].points;
    const auto& cd = m.cube.dates();
    const auto e = *find_on_grid(m.cube.expiry_grid(), m.config.slice.expiry.value());
    const auto n = *find_on_grid(m.cube.tenor_grid(), m.config.slice.tenor.value());
    const double expiry = m.cube.expiry_grid()[e];
    std::size_t checked = 0, bad = 0;
    for (std::size_t a = 0; a < m.forecast.alphas.size(); ++a)
      for (std::size_t t = 0; t < m.forecast.dates.size(); ++t) {
        const auto it = std::lower_bound(cd.begin(), cd.end(), m.forecast.dates[t]);
        const double f = m.cube.forward(static_cast<std::size_t>(it - cd.begin()) - 1, e, n);
        const auto row = m.forecast.extreme[a].row(t);
        const auto curve = extreme_price_curve(f, expiry, mny, std::vector<double>(row.begin(), row.end()));
        ++checked;
        if (!check_no_arbitrage(curve, 1e-10).ok()) ++bad;
      }
    d = fmt("%.0f extreme smiles (alpha 0.01 and 0.99), %.0f violate monotonicity or convexity",
            static_cast<double>(checked), static_cast<double>(bad));
    return checked == 2 * 2000 && bad == 0;
  });

  criterion(8, [](std::string& d) {
    const double f = 0.02;
    const double moneyness[] = {-0.02, -0.01, 0.0, 0.01, 0.02};
    const double vols[] = {0.002, 0.005, 0.01, 0.015, 0.02};
    const double expiries[] = {0.25, 1.0, 2.0, 5.0, 10.0};
    double worst = 0.0;
    for (double dm : moneyness)
      for (double s : vols)
        for (double t : expiries)
          worst = std::max(worst, std::abs(price(f, f - dm, s, t) - integrated_price(f, f - dm, s, t)));
    d = fmt("max |closed form - integral| = %.3e over 125 (f-k, sigma, T) points", worst);
    return worst <= 1e-10;
  });

  std::printf(
      "NOTE criterion 9: desk-data magnitudes (USD eigenvalues, 89.62%% first-mode share, "
      "beta1 = 0.179634) need proprietary data and are not reproduced; criteria 3-6 are the "
      "synthetic substitutes.\n");
  return failures == 0 ? 0 : 1;
}
