// smilerisk: command-line driver for the smile risk pipeline.
//
//   smilerisk synth --seed 7 --out run
//   smilerisk decompose --input run/cube.csv --out run
//   smilerisk fhs --input run/cube.csv --out run
//   smilerisk backtest --out run
//   smilerisk check-arb --input run/cube.csv --out run
//
// Exit codes: 0 success, 1 input error, 2 numerical failure, 3 arbitrage found.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smilerisk/config.hpp"
#include "smilerisk/error.hpp"
#include "smilerisk/format.hpp"
#include "smilerisk/pipeline.hpp"

namespace {

using namespace smilerisk;

constexpr int kInputError = 1;
constexpr int kNumericalError = 2;
constexpr int kArbitrageFound = 3;

struct Options {
  std::string config_path;
  std::string out;
  bool verbose = false;
  std::vector<std::string> overrides;
  std::string input;
  // synth
  std::optional<unsigned long long> seed;
  std::optional<std::size_t> dates;
  std::optional<std::size_t> modes;
  std::string lambdas;
  std::string betas;
  std::optional<double> vol_cluster;
  std::string grid;
};

KeyValues gather(const Options& o, const std::string& command) {
  KeyValues kv;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw Error(Errc::IoError, "cannot open config file " + o.config_path);
    kv = parse_key_values(in, o.config_path);
  }
  for (const auto& s : o.overrides) apply_override(kv, s);
  if (!o.out.empty()) kv["out"] = o.out;
  if (!o.input.empty()) kv["input"] = o.input;
  if (command != "synth") return kv;

  if (o.seed) kv["seed"] = std::to_string(*o.seed);
  if (o.dates) kv["synth.dates"] = std::to_string(*o.dates);
  if (!o.lambdas.empty()) kv["synth.lambdas"] = o.lambdas;
  if (o.modes) {
    if (auto it = kv.find("synth.lambdas"); it != kv.end()) {
      std::size_t count = it->second.empty() ? 0 : 1;
      for (char c : it->second) count += c == ',';
      if (count != *o.modes)
        throw Error(Errc::ConfigError, "--modes " + std::to_string(*o.modes) + " does not match " +
                                           std::to_string(count) + " lambdas");
    } else {
      const std::vector<double> base{9.0, 0.9, 0.1};
      std::string text;
      double last = 0.0;
      for (std::size_t i = 0; i < *o.modes; ++i) {
        last = i < base.size() ? base[i] : last * 0.1;
        text += (i ? "," : "") + format_number(last);
      }
      kv["synth.lambdas"] = text;
    }
  }
  if (!o.betas.empty()) kv["synth.betas"] = o.betas;
  if (o.vol_cluster) kv["synth.vol_cluster"] = format_number(*o.vol_cluster);
  if (!o.grid.empty()) kv["synth.grid"] = o.grid;
  return kv;
}

int run(const Options& o, const std::string& command) {
  const PipelineConfig config = apply_config(PipelineConfig{}, gather(o, command));
  RunContext ctx;
  ctx.out = &std::cout;
  if (o.verbose) ctx.log = &std::cerr;

  RunResult r;
  if (command == "synth") r = run_synth(config, ctx);
  else if (command == "decompose") r = run_decompose(config, ctx);
  else if (command == "fhs") r = run_fhs(config, ctx);
  else if (command == "backtest") r = run_backtest(config, ctx);
  else r = run_check_arb(config, ctx);

  for (const auto& p : r.outputs) std::cout << "wrote " << p.string() << '\n';
  return r.violations > 0 ? kArbitrageFound : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smile dynamics, filtered-historical-simulation VaR and no-arbitrage checks"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  app.add_flag("--verbose,-v", o.verbose, "progress messages on stderr");
  app.add_option("--set", o.overrides, "override a config key (key=value), repeatable");

  auto* synth = app.add_subcommand("synth", "generate a synthetic vol cube");
  synth->add_option("--seed", o.seed, "64-bit seed");
  synth->add_option("--dates", o.dates, "number of dates");
  synth->add_option("--modes", o.modes, "number of modes");
  synth->add_option("--lambdas", o.lambdas, "comma separated relative eigenvalues");
  synth->add_option("--beta", o.betas, "comma separated AR(1) betas per mode");
  synth->add_option("--vol-cluster", o.vol_cluster, "variance persistence in [0,1)");
  synth->add_option("--grid", o.grid, "min:max:count along the synthetic axis");
  synth->add_option("--out", o.out, "output directory");

  synth->fallthrough();
  std::vector<CLI::App*> subs{synth};
  for (const char* name : {"decompose", "fhs", "backtest", "check-arb"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->add_option("--out", o.out, "output directory");
    if (std::string(name) != "backtest") sub->add_option("--input", o.input, "cube CSV");
    subs.push_back(sub);
  }
  subs[1]->description("KL decomposition: spectrum, eigenfunctions, projections");
  subs[2]->description("filtered historical simulation VaR and extreme smiles");
  subs[3]->description("Kupiec and Christoffersen backtests of the VaR report");
  subs[4]->description("no-arbitrage check of the extreme smiles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();

  try {
    return run(o, command);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.category() == ErrorCategory::Input ? kInputError : kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
}
