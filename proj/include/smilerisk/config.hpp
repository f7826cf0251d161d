#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smilerisk/fhs.hpp"
#include "smilerisk/synthmarket.hpp"
#include "smilerisk/volgrid.hpp"

namespace smilerisk {

// Flat `key = value` configuration. Lines starting with '#' and blank lines
// are ignored; list values are comma separated.

using KeyValues = std::map<std::string, std::string>;

struct PipelineConfig {
  std::filesystem::path input;   // cube CSV for decompose/fhs/check-arb
  std::filesystem::path out = "out";
  SliceSpec slice;
  std::vector<std::size_t> basis_degree;  // empty: min(8, points) per axis
  std::size_t n_modes = 3;
  FhsConfig fhs;
  std::vector<double> backtest_alphas;    // empty: fhs.alphas
  double arb_tol = 1e-10;
  std::optional<double> arb_forward;      // used when the cube has no forwards
  SynthSpec synth = default_synth_spec(); // `seed` and `synth.*` keys

  std::vector<double> effective_backtest_alphas() const {
    return backtest_alphas.empty() ? fhs.alphas : backtest_alphas;
  }
  void validate() const;
};

/// Every known key. Anything else in a config file is rejected.
const std::vector<std::string>& config_keys();

/// Throws Error(ConfigError) with `source:line` on malformed lines or
/// repeated keys.
KeyValues parse_key_values(std::istream& in, const std::string& source = "<config>");

/// Applies `kv` on top of `base`. Throws Error(ConfigError) naming the key
/// for unknown keys and unparseable values.
PipelineConfig apply_config(PipelineConfig base, const KeyValues& kv);

/// `key=value` override as given on the command line.
void apply_override(KeyValues& kv, const std::string& assignment);

PipelineConfig load_config(const std::filesystem::path& path);

/// Full key/value rendering; apply_config(PipelineConfig{}, to_key_values(c))
/// reproduces `c`.
KeyValues to_key_values(const PipelineConfig& config);
void write_config(const PipelineConfig& config, std::ostream& out);

}  // namespace smilerisk
