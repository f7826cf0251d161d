#include "smilerisk/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "smilerisk/error.hpp"
#include "smilerisk/format.hpp"

namespace smilerisk {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  throw Error(Errc::ConfigError, "key '" + key + "': " + why + " (got '" + value + "')");
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!parse_number(value, v)) bad_value(key, value, "expected a number");
  return v;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  double v = to_double(key, value);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v)))
    bad_value(key, value, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  std::istringstream in(value);
  if (value.empty() || value.front() == '-' || !(in >> v) || !in.eof())
    bad_value(key, value, "expected an unsigned 64-bit integer");
  return v;
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(to_double(key, item));
  return out;
}

std::optional<double> to_optional(const std::string& key, const std::string& value) {
  if (value.empty() || value == "none") return std::nullopt;
  return to_double(key, value);
}

std::vector<double> to_range(const std::string& key, const std::string& value) {
  // min:max:count
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 3) bad_value(key, value, "expected min:max:count");
  const double a = to_double(key, parts[0]);
  const double b = to_double(key, parts[1]);
  const std::size_t n = to_size(key, parts[2]);
  if (n < 2 || !(b > a)) bad_value(key, value, "need min < max and count >= 2");
  return uniform_points(a, b, n);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_number(v[i]);
  }
  return s;
}

std::string range_text(const GridAxis& axis) {
  return format_number(axis.points.front()) + ":" + format_number(axis.points.back()) + ":" +
         std::to_string(axis.points.size());
}

std::string optional_text(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("none");
}

GridAxis axis_for(Axis axis, int which, std::vector<double> points) {
  if (axis == Axis::Moneyness) return {"moneyness", "decimal", std::move(points)};
  if (axis == Axis::Tenor || (axis == Axis::ExpiryTenor && which == 1))
    return {"tenor", "years", std::move(points)};
  return {"expiry", "years", std::move(points)};
}

Grid default_grid_for(Axis axis) {
  Grid g;
  switch (axis) {
    case Axis::Moneyness: g.axes.push_back(axis_for(axis, 0, uniform_points(-0.02, 0.02, 17))); break;
    case Axis::Expiry: g.axes.push_back(axis_for(axis, 0, uniform_points(1.0, 10.0, 10))); break;
    case Axis::Tenor: g.axes.push_back(axis_for(axis, 0, uniform_points(1.0, 30.0, 30))); break;
    case Axis::ExpiryTenor:
      g.axes.push_back(axis_for(axis, 0, uniform_points(1.0, 10.0, 10)));
      g.axes.push_back(axis_for(axis, 1, uniform_points(1.0, 10.0, 10)));
      break;
  }
  return g;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "input", "out", "seed", "n_modes", "basis.degree",
      "slice.axis", "slice.moneyness", "slice.expiry", "slice.tenor",
      "fhs.L", "fhs.theta", "fhs.W", "fhs.alphas", "fhs.use_ar", "fhs.signs", "fhs.reconstruction",
      "backtest.alphas", "check_arb.tol", "check_arb.forward",
      "synth.axis", "synth.grid", "synth.grid2", "synth.dates", "synth.lambdas",
      "synth.lambda_scale", "synth.betas", "synth.vol_cluster", "synth.arch_share",
      "synth.burn_in", "synth.start", "synth.moneyness", "synth.expiry", "synth.tenor",
      "synth.forward"};
  return keys;
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(Errc::ConfigError, where + ": expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw Error(Errc::ConfigError, where + ": empty key");
    if (kv.count(key)) throw Error(Errc::ConfigError, where + ": key '" + key + "' repeated");
    kv.emplace(std::move(key), std::move(value));
  }
  return kv;
}

void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(std::string_view(assignment).substr(0, eq)).empty())
    throw Error(Errc::ConfigError, "override '" + assignment + "' is not key=value");
  kv[trim(std::string_view(assignment).substr(0, eq))] = trim(std::string_view(assignment).substr(eq + 1));
}

PipelineConfig apply_config(PipelineConfig c, const KeyValues& kv) {
  const auto& known = config_keys();
  for (const auto& [key, value] : kv)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(Errc::ConfigError, "unknown config key '" + key + "'");

  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (auto v = get("input")) c.input = *v;
  if (auto v = get("out")) c.out = *v;
  if (auto v = get("seed")) c.synth.seed = to_u64("seed", *v);
  if (auto v = get("n_modes")) c.n_modes = to_size("n_modes", *v);
  if (auto v = get("basis.degree")) {
    c.basis_degree.clear();
    for (double d : to_doubles("basis.degree", *v)) {
      if (d < 1.0 || d != static_cast<double>(static_cast<std::size_t>(d)))
        bad_value("basis.degree", *v, "expected positive integers");
      c.basis_degree.push_back(static_cast<std::size_t>(d));
    }
  }

  if (auto v = get("slice.axis")) c.slice.axis = parse_axis(*v);
  if (auto v = get("synth.axis")) {
    c.synth.axis = parse_axis(*v);
    c.synth.grid = default_grid_for(c.synth.axis);
  }
  if (auto v = get("fhs.reconstruction")) c.fhs.reconstruction = parse_reconstruction(*v);
  if (auto v = get("slice.moneyness")) c.slice.moneyness = to_optional("slice.moneyness", *v);
  if (auto v = get("slice.expiry")) c.slice.expiry = to_optional("slice.expiry", *v);
  if (auto v = get("slice.tenor")) c.slice.tenor = to_optional("slice.tenor", *v);

  if (auto v = get("fhs.L")) c.fhs.window = to_size("fhs.L", *v);
  if (auto v = get("fhs.theta")) c.fhs.ewma.theta = to_double("fhs.theta", *v);
  if (auto v = get("fhs.W")) c.fhs.ewma.window = to_size("fhs.W", *v);
  if (auto v = get("fhs.alphas")) c.fhs.alphas = to_doubles("fhs.alphas", *v);
  if (auto v = get("fhs.use_ar")) {
    c.fhs.use_ar.clear();
    for (const auto& item : split_list(*v)) {
      if (item == "1" || item == "true") c.fhs.use_ar.push_back(true);
      else if (item == "0" || item == "false") c.fhs.use_ar.push_back(false);
      else bad_value("fhs.use_ar", *v, "expected a list of 0/1");
    }
  }
  if (auto v = get("fhs.signs")) {
    c.fhs.signs.clear();
    for (double s : to_doubles("fhs.signs", *v)) {
      if (s != 1.0 && s != -1.0) bad_value("fhs.signs", *v, "expected a list of +1/-1");
      c.fhs.signs.push_back(static_cast<int>(s));
    }
  }
  if (auto v = get("backtest.alphas")) c.backtest_alphas = to_doubles("backtest.alphas", *v);
  if (auto v = get("check_arb.tol")) c.arb_tol = to_double("check_arb.tol", *v);
  if (auto v = get("check_arb.forward")) c.arb_forward = to_optional("check_arb.forward", *v);

  auto& s = c.synth;
  if (auto v = get("synth.grid")) s.grid.axes.at(0).points = to_range("synth.grid", *v);
  if (auto v = get("synth.grid2")) {
    if (s.grid.dims() != 2) bad_value("synth.grid2", *v, "only valid with synth.axis = expiry_tenor");
    s.grid.axes[1].points = to_range("synth.grid2", *v);
  }
  if (auto v = get("synth.dates")) s.n_dates = to_size("synth.dates", *v);
  if (auto v = get("synth.lambdas")) s.lambdas = to_doubles("synth.lambdas", *v);
  if (auto v = get("synth.lambda_scale")) s.lambda_scale = to_double("synth.lambda_scale", *v);
  if (auto v = get("synth.betas")) s.ar_betas = to_doubles("synth.betas", *v);
  if (auto v = get("synth.vol_cluster")) s.vol_cluster = to_double("synth.vol_cluster", *v);
  if (auto v = get("synth.arch_share")) s.arch_share = to_double("synth.arch_share", *v);
  if (auto v = get("synth.burn_in")) s.burn_in = to_size("synth.burn_in", *v);
  if (auto v = get("synth.start")) {
    try {
      s.start = Date::parse(*v);
    } catch (const Error&) {
      bad_value("synth.start", *v, "expected YYYY-MM-DD");
    }
  }
  if (auto v = get("synth.moneyness")) s.fixed_moneyness = to_double("synth.moneyness", *v);
  if (auto v = get("synth.expiry")) s.fixed_expiry = to_double("synth.expiry", *v);
  if (auto v = get("synth.tenor")) s.fixed_tenor = to_double("synth.tenor", *v);
  if (auto v = get("synth.forward")) s.forward = to_optional("synth.forward", *v);
  return c;
}

void PipelineConfig::validate() const {
  auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == Errc::ConfigError) throw;
      throw Error(Errc::ConfigError, e.what());
    }
  };
  if (n_modes == 0) throw Error(Errc::ConfigError, "n_modes must be >= 1");
  if (!(arb_tol >= 0.0)) throw Error(Errc::ConfigError, "check_arb.tol must be >= 0");
  for (double a : effective_backtest_alphas())
    if (!(a > 0.0 && a < 1.0)) throw Error(Errc::ConfigError, "backtest alphas must lie in (0,1)");
  wrap([&] { fhs.validate(); });
  wrap([&] { synth.validate(); });
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open config file " + path.string());
  return apply_config(PipelineConfig{}, parse_key_values(in, path.string()));
}

KeyValues to_key_values(const PipelineConfig& c) {
  KeyValues kv;
  kv["input"] = c.input.string();
  kv["out"] = c.out.string();
  kv["seed"] = std::to_string(c.synth.seed);
  kv["n_modes"] = std::to_string(c.n_modes);
  {
    std::vector<double> d(c.basis_degree.begin(), c.basis_degree.end());
    kv["basis.degree"] = join(d);
  }
  kv["slice.axis"] = std::string(to_string(c.slice.axis));
  kv["slice.moneyness"] = optional_text(c.slice.moneyness);
  kv["slice.expiry"] = optional_text(c.slice.expiry);
  kv["slice.tenor"] = optional_text(c.slice.tenor);
  kv["fhs.L"] = std::to_string(c.fhs.window);
  kv["fhs.theta"] = format_number(c.fhs.ewma.theta);
  kv["fhs.W"] = std::to_string(c.fhs.ewma.window);
  kv["fhs.alphas"] = join(c.fhs.alphas);
  {
    std::string s;
    for (std::size_t i = 0; i < c.fhs.use_ar.size(); ++i) s += (i ? "," : "") + std::string(c.fhs.use_ar[i] ? "1" : "0");
    kv["fhs.use_ar"] = s;
  }
  {
    std::vector<double> s(c.fhs.signs.begin(), c.fhs.signs.end());
    kv["fhs.signs"] = join(s);
  }
  kv["fhs.reconstruction"] = std::string(to_string(c.fhs.reconstruction));
  kv["backtest.alphas"] = join(c.backtest_alphas);
  kv["check_arb.tol"] = format_number(c.arb_tol);
  kv["check_arb.forward"] = optional_text(c.arb_forward);

  const auto& s = c.synth;
  kv["synth.axis"] = std::string(to_string(s.axis));
  if (s.grid.dims() >= 1) kv["synth.grid"] = range_text(s.grid.axes[0]);
  if (s.grid.dims() == 2) kv["synth.grid2"] = range_text(s.grid.axes[1]);
  kv["synth.dates"] = std::to_string(s.n_dates);
  kv["synth.lambdas"] = join(s.lambdas);
  kv["synth.lambda_scale"] = format_number(s.lambda_scale);
  kv["synth.betas"] = join(s.ar_betas);
  kv["synth.vol_cluster"] = format_number(s.vol_cluster);
  kv["synth.arch_share"] = format_number(s.arch_share);
  kv["synth.burn_in"] = std::to_string(s.burn_in);
  kv["synth.start"] = s.start.iso();
  kv["synth.moneyness"] = format_number(s.fixed_moneyness);
  kv["synth.expiry"] = format_number(s.fixed_expiry);
  kv["synth.tenor"] = format_number(s.fixed_tenor);
  kv["synth.forward"] = optional_text(s.forward);
  return kv;
}

void write_config(const PipelineConfig& config, std::ostream& out) {
  for (const auto& [key, value] : to_key_values(config)) out << key << " = " << value << '\n';
}

}  // namespace smilerisk
