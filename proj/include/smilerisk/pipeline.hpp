#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "smilerisk/bachelier.hpp"
#include "smilerisk/config.hpp"
#include "smilerisk/fhs.hpp"
#include "smilerisk/kldecomp.hpp"
#include "smilerisk/volgrid.hpp"

namespace smilerisk {

// Output file names inside the output directory.
namespace files {
inline constexpr const char* cube = "cube.csv";
inline constexpr const char* synth_modes = "synth_modes.csv";
inline constexpr const char* synth_truth = "synth_truth.json";
inline constexpr const char* spectrum = "spectrum.json";
inline constexpr const char* eigenfunctions = "eigenfunctions.csv";
inline constexpr const char* projections = "projections.csv";
inline constexpr const char* var = "var.csv";
inline constexpr const char* extreme_smiles = "extreme_smiles.csv";
inline constexpr const char* backtest_json = "backtest.json";
inline constexpr const char* backtest_csv = "backtest.csv";
inline constexpr const char* arbitrage = "arbitrage.json";
}  // namespace files

/// Slice → log-returns → centering → decomposition → projection.
struct Analysis {
  FieldSeries field;   // vol levels on the slice grid
  ReturnField returns;
  KLModel model;
  ProjectionSeries projections;
};

Analysis analyze(const VolCubeSeries& cube, const PipelineConfig& config);

/// Per-mode forecasts plus combined extreme smiles on the dates every mode
/// covers.
struct VarForecast {
  std::vector<ModeForecast> modes;
  std::vector<Date> dates;
  std::vector<double> alphas;         // scenario levels (fhs.alphas)
  Matrix last;                        // I(t−1,·), rows = dates
  std::vector<Matrix> extreme;        // per alpha: Î(t,·), rows = dates
  std::vector<Matrix> log_return;     // per alpha: û(t,·)
};

VarForecast forecast_var(const Analysis& analysis, const FhsConfig& config);

/// Strikes are f plus every moneyness node (and f itself). Needs a moneyness
/// slice.
PriceCurve extreme_price_curve(double forward, double expiry, std::span<const double> moneyness,
                               std::span<const double> smile);

struct RunContext {
  std::ostream* out = nullptr;  // human-readable tables
  std::ostream* log = nullptr;  // progress messages (verbose)
};

struct RunResult {
  std::vector<std::filesystem::path> outputs;
  std::filesystem::path manifest;
  std::size_t violations = 0;  // check-arb only
};

RunResult run_synth(const PipelineConfig& config, const RunContext& ctx = {});
RunResult run_decompose(const PipelineConfig& config, const RunContext& ctx = {});
RunResult run_fhs(const PipelineConfig& config, const RunContext& ctx = {});
RunResult run_backtest(const PipelineConfig& config, const RunContext& ctx = {});
RunResult run_check_arb(const PipelineConfig& config, const RunContext& ctx = {});

}  // namespace smilerisk
