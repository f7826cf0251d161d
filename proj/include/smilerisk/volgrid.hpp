#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smilerisk/date.hpp"
#include "smilerisk/linalg.hpp"

namespace smilerisk {

// Implied normal (Bachelier) vols, stored as absolute decimals:
// 0.0065 is 65 normal basis points. Moneyness is strike minus forward rate.

enum class Axis { Moneyness, Expiry, Tenor, ExpiryTenor };

std::string_view to_string(Axis axis);
/// Accepts "moneyness", "expiry", "tenor", "expiry_tenor" (also "expiry-tenor",
/// "expiryxtenor").
Axis parse_axis(std::string_view text);

struct GridAxis {
  std::string name;
  std::string unit;
  std::vector<double> points;  // strictly increasing

  friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

/// One axis (a smile) or two axes (a rectangular lattice). Lattice points are
/// enumerated with the first axis outermost.
struct Grid {
  std::vector<GridAxis> axes;

  std::size_t dims() const { return axes.size(); }
  std::size_t size() const;
  std::vector<double> point(std::size_t index) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

Grid make_grid_1d(std::string name, std::string unit, std::vector<double> points);

class VolCubeSeries {
 public:
  /// `vols` is indexed (date, moneyness, expiry, tenor) row-major; `forwards`
  /// (if given) is indexed (date, expiry, tenor). Validates every invariant.
  VolCubeSeries(std::vector<Date> dates, std::vector<double> moneyness,
                std::vector<double> expiry, std::vector<double> tenor,
                std::vector<double> vols,
                std::optional<std::vector<double>> forwards = std::nullopt);

  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<double>& moneyness_grid() const { return moneyness_; }
  const std::vector<double>& expiry_grid() const { return expiry_; }
  const std::vector<double>& tenor_grid() const { return tenor_; }
  const std::vector<double>& vols() const { return vols_; }
  bool has_forwards() const { return forwards_.has_value(); }

  double vol(std::size_t d, std::size_t m, std::size_t e, std::size_t n) const {
    return vols_[((d * moneyness_.size() + m) * expiry_.size() + e) * tenor_.size() + n];
  }
  /// Throws Error(InvalidArgument) when the cube carries no forwards.
  double forward(std::size_t d, std::size_t e, std::size_t n) const;

  /// (dates, moneyness, expiry, tenor)
  std::array<std::size_t, 4> shape() const {
    return {dates_.size(), moneyness_.size(), expiry_.size(), tenor_.size()};
  }

 private:
  std::vector<Date> dates_;
  std::vector<double> moneyness_;
  std::vector<double> expiry_;
  std::vector<double> tenor_;
  std::vector<double> vols_;
  std::optional<std::vector<double>> forwards_;
};

/// Fixed coordinates for the axes that do not vary. Axes that vary are
/// ignored if set.
struct SliceSpec {
  Axis axis = Axis::Moneyness;
  std::optional<double> moneyness;
  std::optional<double> expiry;
  std::optional<double> tenor;
};

/// Per-date function samples on a shared grid; `values` has one row per date.
struct FieldSeries {
  std::vector<Date> dates;
  Grid grid;
  Matrix values;
};

struct ReturnField {
  FieldSeries field;
  std::vector<double> mean_function;  // empty until centered
  bool centered = false;
};

/// CSV with header `date,expiry_years,tenor_years,moneyness,vol[,forward]`.
VolCubeSeries load_cube_csv(const std::filesystem::path& path);
VolCubeSeries parse_cube_csv(std::istream& in, const std::string& source = "<stream>");
void write_cube_csv(const VolCubeSeries& cube, std::ostream& out);

/// Index of `value` on `grid` (tolerance 1e-12 relative), or nullopt.
std::optional<std::size_t> find_on_grid(const std::vector<double>& grid, double value);

FieldSeries extract_slice(const VolCubeSeries& cube, const SliceSpec& spec);

/// u(t,x) = log I(t,x) − log I(t−1,x); the first date is dropped.
ReturnField log_returns(const FieldSeries& fs);

/// Subtracts the per-point sample mean and stores it.
ReturnField center(const ReturnField& rf);

/// Adds mean_function back onto a centered field.
FieldSeries uncenter(const ReturnField& rf);

}  // namespace smilerisk
