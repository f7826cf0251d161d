#include "smilerisk/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "smilerisk/backtest.hpp"
#include "smilerisk/error.hpp"
#include "smilerisk/format.hpp"
#include "smilerisk/reports.hpp"
#include "smilerisk/synthmarket.hpp"

namespace smilerisk {

namespace {

using nlohmann::ordered_json;

void log_line(const RunContext& ctx, const std::string& msg) {
  if (ctx.log) *ctx.log << msg << '\n';
}

std::filesystem::path out_path(const PipelineConfig& c, const char* name) { return c.out / name; }

RunResult finish(const char* command, const PipelineConfig& config,
                 const std::vector<std::filesystem::path>& inputs,
                 std::vector<std::filesystem::path> outputs, const RunContext& ctx) {
  std::vector<FileDigest> in, out;
  for (const auto& p : inputs) in.push_back(digest(p));
  for (const auto& p : outputs) out.push_back(digest(p, config.out));
  RunResult r;
  r.manifest = config.out / (std::string("manifest_") + command + ".json");
  write_text_file(r.manifest, manifest_json(command, config, in, out));
  log_line(ctx, "wrote " + r.manifest.string());
  r.outputs = std::move(outputs);
  return r;
}

std::string alpha_tag(double alpha) { return "q" + format_number(alpha); }

BasisSpec basis_for(const Grid& grid, const std::vector<std::size_t>& degree) {
  if (degree.empty()) return default_basis(grid);
  BasisSpec b;
  if (degree.size() == 1) {
    b.degree.assign(grid.dims(), degree[0]);
  } else if (degree.size() == grid.dims()) {
    b.degree = degree;
  } else {
    throw Error(Errc::ConfigError, "basis.degree needs 1 or " + std::to_string(grid.dims()) + " entries");
  }
  return b;
}

VolCubeSeries load_input(const PipelineConfig& config) {
  if (config.input.empty()) throw Error(Errc::ConfigError, "no input cube given (key 'input')");
  return load_cube_csv(config.input);
}

// Index of the fixed coordinate on a cube axis, or 0 if the axis has one point.
std::size_t fixed_index(const std::vector<double>& grid, const std::optional<double>& value,
                        const char* name) {
  if (!value) {
    if (grid.size() == 1) return 0;
    throw Error(Errc::ConfigError, std::string("slice.") + name + " must be set");
  }
  auto idx = find_on_grid(grid, *value);
  if (!idx) throw Error(Errc::OffGridCoordinate, std::string(name) + " " + format_number(*value) + " is not on the grid");
  return *idx;
}

std::string grid_header(const Grid& grid) {
  std::string h;
  for (std::size_t k = 0; k < grid.dims(); ++k) h += (k ? "," : "") + grid.axes[k].name;
  return h;
}

std::string grid_coords(const Grid& grid, std::size_t j) {
  const auto p = grid.point(j);
  std::string s;
  for (std::size_t k = 0; k < p.size(); ++k) s += (k ? "," : "") + format_number(p[k]);
  return s;
}

std::string mode_csv(const Grid& grid, std::size_t n_modes,
                     const std::function<double(std::size_t, std::size_t)>& value) {
  std::ostringstream os;
  os << grid_header(grid);
  for (std::size_t i = 0; i < n_modes; ++i) os << ",e" << i + 1;
  os << '\n';
  for (std::size_t j = 0; j < grid.size(); ++j) {
    os << grid_coords(grid, j);
    for (std::size_t i = 0; i < n_modes; ++i) os << ',' << format_number(value(j, i));
    os << '\n';
  }
  return os.str();
}

}  // namespace

Analysis analyze(const VolCubeSeries& cube, const PipelineConfig& config) {
  Analysis a;
  a.field = extract_slice(cube, config.slice);
  a.returns = center(log_returns(a.field));
  const BasisSpec basis = basis_for(a.returns.field.grid, config.basis_degree);
  a.model = decompose(a.returns, basis, config.n_modes);
  a.projections = project(a.returns, a.model);
  return a;
}

VarForecast forecast_var(const Analysis& analysis, const FhsConfig& config) {
  config.validate();
  VarForecast v;
  const auto& dates = analysis.projections.dates;
  const std::size_t r = analysis.model.modes.size();
  for (std::size_t i = 0; i < r; ++i)
    v.modes.push_back(forecast_mode(dates, analysis.projections.mode_series(i), i, config));

  auto position = [](const std::vector<Date>& list, Date d) -> std::optional<std::size_t> {
    auto it = std::lower_bound(list.begin(), list.end(), d);
    if (it == list.end() || *it != d) return std::nullopt;
    return static_cast<std::size_t>(it - list.begin());
  };
  for (Date d : v.modes.front().dates) {
    bool everywhere = true;
    for (const auto& m : v.modes) everywhere = everywhere && position(m.dates, d).has_value();
    if (everywhere) v.dates.push_back(d);
  }

  const auto& levels = analysis.field;
  const std::size_t np = levels.grid.size();
  v.alphas = config.alphas;
  v.last = Matrix(v.dates.size(), np);
  v.extreme.assign(v.alphas.size(), Matrix(v.dates.size(), np));
  v.log_return.assign(v.alphas.size(), Matrix(v.dates.size(), np));

  for (std::size_t k = 0; k < v.dates.size(); ++k) {
    const auto row = position(levels.dates, v.dates[k]);
    if (!row || *row == 0) throw Error(Errc::MissingLastSmile, "no smile before " + v.dates[k].iso());
    const auto last = levels.values.row(*row - 1);
    std::copy(last.begin(), last.end(), v.last.row(k).begin());
    for (std::size_t a = 0; a < v.alphas.size(); ++a) {
      const auto mode_levels = scenario_levels(v.alphas[a], r, config);
      std::vector<double> xi_hat(r);
      for (std::size_t i = 0; i < r; ++i) {
        const auto& m = v.modes[i];
        xi_hat[i] = m.xi_q.values(*position(m.dates, v.dates[k]), m.xi_q.column(mode_levels[i]));
      }
      const auto ext = extreme_field(analysis.model, xi_hat, last, config.reconstruction);
      const auto u = extreme_log_return(analysis.model, xi_hat);
      std::copy(ext.begin(), ext.end(), v.extreme[a].row(k).begin());
      std::copy(u.begin(), u.end(), v.log_return[a].row(k).begin());
    }
  }
  return v;
}

PriceCurve extreme_price_curve(double forward, double expiry, std::span<const double> moneyness,
                               std::span<const double> smile) {
  std::vector<double> strikes;
  for (double m : moneyness) strikes.push_back(forward + m);
  strikes.push_back(forward);
  std::sort(strikes.begin(), strikes.end());
  strikes.erase(std::unique(strikes.begin(), strikes.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-14 * (1.0 + std::abs(a)); }),
                strikes.end());
  return price_curve(forward, strikes, moneyness, smile, expiry);
}

RunResult run_synth(const PipelineConfig& config, const RunContext& ctx) {
  config.validate();
  const SynthSpec& spec = config.synth;
  log_line(ctx, "synth: " + std::to_string(spec.n_dates) + " dates, " +
                    std::to_string(spec.n_modes()) + " modes, seed " + std::to_string(spec.seed));
  const Matrix modes = make_orthonormal_modes(spec.grid, spec.n_modes());
  const Matrix xi = simulate_projections(spec);
  const VolCubeSeries cube = synthesize_cube(spec, modes, xi);

  std::ostringstream cube_text;
  write_cube_csv(cube, cube_text);
  const auto cube_path = out_path(config, files::cube);
  write_text_file(cube_path, cube_text.str());

  const auto modes_path = out_path(config, files::synth_modes);
  write_text_file(modes_path, mode_csv(spec.grid, spec.n_modes(),
                                       [&](std::size_t j, std::size_t i) { return modes(j, i); }));

  const auto lambdas = spec.true_lambdas();
  double total = 0.0;
  for (double l : lambdas) total += l;
  ordered_json truth;
  truth["axis"] = to_string(spec.axis);
  truth["lambdas"] = lambdas;
  std::vector<double> shares;
  for (double l : lambdas) shares.push_back(l / total);
  truth["shares"] = shares;
  std::vector<double> betas;
  for (std::size_t i = 0; i < spec.n_modes(); ++i) betas.push_back(spec.beta_for(i));
  truth["ar_betas"] = betas;
  truth["n_dates"] = spec.n_dates;
  truth["grid_size"] = spec.grid.size();
  const auto truth_path = out_path(config, files::synth_truth);
  write_text_file(truth_path, truth.dump(2) + "\n");

  return finish("synth", config, {}, {cube_path, modes_path, truth_path}, ctx);
}

RunResult run_decompose(const PipelineConfig& config, const RunContext& ctx) {
  config.validate();
  const VolCubeSeries cube = load_input(config);
  log_line(ctx, "decompose: loaded " + config.input.string());
  const Analysis a = analyze(cube, config);
  const KLModel& model = a.model;
  const auto shares = explained_variance(model);
  const std::size_t r = model.modes.size();

  ordered_json spec;
  std::vector<double> lambdas;
  for (const auto& m : model.modes) lambdas.push_back(m.eigenvalue);
  spec["axis"] = to_string(config.slice.axis);
  spec["lambdas"] = lambdas;
  spec["shares"] = shares;
  spec["spectrum"] = model.spectrum;
  spec["basis_degree"] = model.basis.degree;
  spec["grid_size"] = model.grid.size();
  spec["n_returns"] = a.returns.field.dates.size();
  const auto spectrum_path = out_path(config, files::spectrum);
  write_text_file(spectrum_path, spec.dump(2) + "\n");

  const auto eig_path = out_path(config, files::eigenfunctions);
  write_text_file(eig_path, mode_csv(model.grid, r, [&](std::size_t j, std::size_t i) {
                    return model.modes[i].samples[j];
                  }));

  std::ostringstream proj;
  proj << "date";
  for (std::size_t i = 0; i < r; ++i) proj << ",xi_" << i + 1;
  proj << '\n';
  for (std::size_t t = 0; t < a.projections.dates.size(); ++t) {
    proj << a.projections.dates[t].iso();
    for (std::size_t i = 0; i < r; ++i) proj << ',' << format_number(a.projections.xi(t, i));
    proj << '\n';
  }
  const auto proj_path = out_path(config, files::projections);
  write_text_file(proj_path, proj.str());

  if (ctx.out) {
    auto& os = *ctx.out;
    os << "mode  eigenvalue      share     cumulative\n";
    double cum = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      cum += shares[i];
      os << std::setw(4) << i + 1 << "  " << std::setw(12) << std::scientific << std::setprecision(4)
         << lambdas[i] << "  " << std::fixed << std::setprecision(2) << std::setw(8)
         << 100.0 * shares[i] << "%  " << std::setw(8) << 100.0 * cum << "%\n";
    }
    os.unsetf(std::ios::floatfield);
  }
  return finish("decompose", config, {config.input}, {spectrum_path, eig_path, proj_path}, ctx);
}

RunResult run_fhs(const PipelineConfig& config, const RunContext& ctx) {
  config.validate();
  const VolCubeSeries cube = load_input(config);
  const Analysis a = analyze(cube, config);
  log_line(ctx, "fhs: " + std::to_string(a.projections.dates.size()) + " projection dates");
  const VarForecast v = forecast_var(a, config.fhs);
  log_line(ctx, "fhs: " + std::to_string(v.dates.size()) + " forecast dates");

  const std::size_t r = v.modes.size();
  std::ostringstream var;
  var << "date";
  for (std::size_t i = 0; i < r; ++i) {
    const std::string n = std::to_string(i + 1);
    var << ",xi_" << n << ",eps_" << n << ",sigma_" << n;
    for (double al : config.fhs.alphas) var << ",eps_" << n << '_' << alpha_tag(al);
    for (double al : config.fhs.alphas) var << ",xi_" << n << '_' << alpha_tag(al);
  }
  var << '\n';
  for (Date d : v.dates) {
    var << d.iso();
    for (const auto& m : v.modes) {
      const std::size_t k = static_cast<std::size_t>(std::lower_bound(m.dates.begin(), m.dates.end(), d) - m.dates.begin());
      var << ',' << format_number(m.xi[k]) << ',' << format_number(m.eps[k]) << ','
          << format_number(m.sigma[k]);
      for (std::size_t c = 0; c < config.fhs.alphas.size(); ++c) var << ',' << format_number(m.eps_q.values(k, c));
      for (std::size_t c = 0; c < config.fhs.alphas.size(); ++c) var << ',' << format_number(m.xi_q.values(k, c));
    }
    var << '\n';
  }
  const auto var_path = out_path(config, files::var);
  write_text_file(var_path, var.str());

  const Grid& grid = a.field.grid;
  std::ostringstream ext;
  ext << "date,alpha," << grid_header(grid) << ",last_vol,extreme_vol,log_return\n";
  for (std::size_t k = 0; k < v.dates.size(); ++k)
    for (std::size_t al = 0; al < v.alphas.size(); ++al)
      for (std::size_t j = 0; j < grid.size(); ++j)
        ext << v.dates[k].iso() << ',' << format_number(v.alphas[al]) << ',' << grid_coords(grid, j)
            << ',' << format_number(v.last(k, j)) << ',' << format_number(v.extreme[al](k, j)) << ','
            << format_number(v.log_return[al](k, j)) << '\n';
  const auto ext_path = out_path(config, files::extreme_smiles);
  write_text_file(ext_path, ext.str());

  if (ctx.out) {
    *ctx.out << "forecast dates: " << v.dates.size() << " (" << v.dates.front().iso() << " .. "
             << v.dates.back().iso() << ")\n";
    for (const auto& m : v.modes) {
      *ctx.out << "mode " << m.mode + 1;
      if (m.ar) *ctx.out << "  AR(1) beta " << format_number(m.ar->beta);
      *ctx.out << '\n';
    }
  }
  return finish("fhs", config, {config.input}, {var_path, ext_path}, ctx);
}

RunResult run_backtest(const PipelineConfig& config, const RunContext& ctx) {
  config.validate();
  const auto var_path = out_path(config, files::var);
  const CsvTable t = read_csv(var_path);
  const std::size_t date_col = t.column("date");
  std::vector<Date> dates;
  for (const auto& row : t.rows) dates.push_back(Date::parse(row[date_col]));

  std::size_t n_modes = 0;
  while (std::find(t.header.begin(), t.header.end(), "eps_" + std::to_string(n_modes + 1)) != t.header.end())
    ++n_modes;
  if (n_modes == 0) throw Error(Errc::InvalidArgument, var_path.string() + ": no eps_<mode> columns");

  ordered_json arr = ordered_json::array();
  std::ostringstream csv;
  csv << "mode,tail,alpha,n,hits,alpha_hat,T00,T01,T10,T11,pof_stat,pof_pvalue,ind_stat,ind_pvalue\n";
  if (ctx.out) *ctx.out << "mode  tail   alpha   hits/n      POF p     IND p\n";
  for (std::size_t i = 1; i <= n_modes; ++i) {
    const std::string n = std::to_string(i);
    const std::size_t eps_col = t.column("eps_" + n);
    std::vector<double> realized;
    for (std::size_t r = 0; r < t.rows.size(); ++r) realized.push_back(t.number(r, eps_col));
    for (double alpha : config.effective_backtest_alphas()) {
      const std::string qname = "eps_" + n + "_" + alpha_tag(alpha);
      if (std::find(t.header.begin(), t.header.end(), qname) == t.header.end())
        throw Error(Errc::ConfigError, "alpha " + format_number(alpha) + " was not forecast (no column " + qname + ")");
      const std::size_t q_col = t.column(qname);
      std::vector<double> q;
      for (std::size_t r = 0; r < t.rows.size(); ++r) q.push_back(t.number(r, q_col));
      const HitSequence h = hit_sequence(dates, realized, dates, q, alpha);
      const BacktestReport rep = run_backtest(h);
      const auto& c = rep.counts;
      ordered_json j;
      j["mode"] = i;
      j["tail"] = to_string(rep.tail);
      j["alpha"] = alpha;
      j["n"] = h.hits.size();
      j["hits"] = c.t1;
      j["alpha_hat"] = rep.alpha_hat;
      j["T00"] = c.t00;
      j["T01"] = c.t01;
      j["T10"] = c.t10;
      j["T11"] = c.t11;
      j["pof_stat"] = rep.pof_stat;
      j["pof_pvalue"] = rep.pof_pvalue;
      j["ind_stat"] = rep.ind_stat;
      j["ind_pvalue"] = rep.ind_pvalue;
      arr.push_back(j);
      csv << i << ',' << to_string(rep.tail) << ',' << format_number(alpha) << ',' << h.hits.size() << ','
          << c.t1 << ',' << format_number(rep.alpha_hat) << ',' << c.t00 << ',' << c.t01 << ',' << c.t10
          << ',' << c.t11 << ',' << format_number(rep.pof_stat) << ',' << format_number(rep.pof_pvalue)
          << ',' << format_number(rep.ind_stat) << ',' << format_number(rep.ind_pvalue) << '\n';
      if (ctx.out) {
        auto& os = *ctx.out;
        os << std::setw(4) << i << "  " << std::setw(5) << to_string(rep.tail) << "  " << std::setw(5)
           << format_number(alpha) << "  " << std::setw(4) << c.t1 << '/' << std::setw(5) << std::left
           << h.hits.size() << std::right << "  " << std::fixed << std::setprecision(2) << std::setw(6)
           << 100.0 * rep.pof_pvalue << "%  " << std::setw(6) << 100.0 * rep.ind_pvalue << "%\n";
        os.unsetf(std::ios::floatfield);
      }
    }
  }
  const auto json_path = out_path(config, files::backtest_json);
  write_text_file(json_path, arr.dump(2) + "\n");
  const auto csv_path = out_path(config, files::backtest_csv);
  write_text_file(csv_path, csv.str());
  return finish("backtest", config, {var_path}, {json_path, csv_path}, ctx);
}

RunResult run_check_arb(const PipelineConfig& config, const RunContext& ctx) {
  config.validate();
  if (config.slice.axis != Axis::Moneyness)
    throw Error(Errc::ConfigError, "check-arb needs a moneyness slice (slice.axis = moneyness)");
  const VolCubeSeries cube = load_input(config);
  const std::size_t e = fixed_index(cube.expiry_grid(), config.slice.expiry, "expiry");
  const std::size_t n = fixed_index(cube.tenor_grid(), config.slice.tenor, "tenor");
  const double expiry = cube.expiry_grid()[e];
  if (!cube.has_forwards() && !config.arb_forward)
    throw Error(Errc::ConfigError, "cube has no forwards; set check_arb.forward");

  const auto ext_path = out_path(config, files::extreme_smiles);
  const CsvTable t = read_csv(ext_path);
  const std::size_t c_date = t.column("date"), c_alpha = t.column("alpha"),
                    c_m = t.column("moneyness"), c_vol = t.column("extreme_vol");

  ordered_json arr = ordered_json::array();
  std::size_t bad = 0, checked = 0;
  std::size_t r = 0;
  while (r < t.rows.size()) {
    const std::string date_text = t.rows[r][c_date];
    const std::string alpha_text = t.rows[r][c_alpha];
    std::vector<double> m, vol;
    for (; r < t.rows.size() && t.rows[r][c_date] == date_text && t.rows[r][c_alpha] == alpha_text; ++r) {
      m.push_back(t.number(r, c_m));
      vol.push_back(t.number(r, c_vol));
    }
    const Date d = Date::parse(date_text);
    double forward = 0.0;
    if (cube.has_forwards()) {
      const auto& cd = cube.dates();
      auto it = std::lower_bound(cd.begin(), cd.end(), d);
      if (it == cd.end() || *it != d || it == cd.begin())
        throw Error(Errc::DateMisalignment, ext_path.string() + ": no prior cube date for " + date_text);
      forward = cube.forward(static_cast<std::size_t>(it - cd.begin()) - 1, e, n);
    } else {
      forward = *config.arb_forward;
    }
    const ArbitrageReport rep = check_no_arbitrage(extreme_price_curve(forward, expiry, m, vol), config.arb_tol);
    ++checked;
    if (!rep.ok()) ++bad;
    ordered_json j;
    double alpha = 0.0;
    parse_number(alpha_text, alpha);
    j["date"] = date_text;
    j["alpha"] = alpha;
    j["monotone_ok"] = rep.monotone_ok;
    j["convex_ok"] = rep.convex_ok;
    ordered_json vs = ordered_json::array();
    for (const auto& vio : rep.violations) vs.push_back({{"index", vio.index}, {"kind", to_string(vio.kind)}});
    j["violations"] = vs;
    arr.push_back(j);
  }
  const auto json_path = out_path(config, files::arbitrage);
  write_text_file(json_path, arr.dump(2) + "\n");
  if (ctx.out) *ctx.out << "checked " << checked << " extreme smiles, " << bad << " violate no-arbitrage\n";
  RunResult res = finish("check-arb", config, {config.input, ext_path}, {json_path}, ctx);
  res.violations = bad;
  return res;
}

}  // namespace smilerisk
