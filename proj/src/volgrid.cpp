#include "smilerisk/volgrid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "smilerisk/error.hpp"
#include "smilerisk/format.hpp"

namespace smilerisk {

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::Moneyness: return "moneyness";
    case Axis::Expiry: return "expiry";
    case Axis::Tenor: return "tenor";
    case Axis::ExpiryTenor: return "expiry_tenor";
  }
  return "?";
}

Axis parse_axis(std::string_view text) {
  if (text == "moneyness") return Axis::Moneyness;
  if (text == "expiry") return Axis::Expiry;
  if (text == "tenor") return Axis::Tenor;
  if (text == "expiry_tenor" || text == "expiry-tenor" || text == "expiryxtenor" ||
      text == "expiry×tenor")
    return Axis::ExpiryTenor;
  throw Error(Errc::ConfigError, "unknown slice axis '" + std::string(text) + "'");
}

std::size_t Grid::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.points.size();
  return n;
}

std::vector<double> Grid::point(std::size_t index) const {
  std::vector<double> coords(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::size_t n = axes[k].points.size();
    coords[k] = axes[k].points[index % n];
    index /= n;
  }
  return coords;
}

Grid make_grid_1d(std::string name, std::string unit, std::vector<double> points) {
  return Grid{{GridAxis{std::move(name), std::move(unit), std::move(points)}}};
}

namespace {

void require_strictly_increasing(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw Error(Errc::InvalidArgument, std::string(what) + " grid is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw Error(Errc::InvalidArgument, std::string(what) + " grid has a non-finite value");
    if (i > 0 && !(v[i] > v[i - 1]))
      throw Error(Errc::InvalidArgument, std::string(what) + " grid is not strictly increasing");
  }
}

}  // namespace

VolCubeSeries::VolCubeSeries(std::vector<Date> dates, std::vector<double> moneyness,
                             std::vector<double> expiry, std::vector<double> tenor,
                             std::vector<double> vols,
                             std::optional<std::vector<double>> forwards)
    : dates_(std::move(dates)),
      moneyness_(std::move(moneyness)),
      expiry_(std::move(expiry)),
      tenor_(std::move(tenor)),
      vols_(std::move(vols)),
      forwards_(std::move(forwards)) {
  if (dates_.empty()) throw Error(Errc::TooFewDates, "cube has no dates");
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i] > dates_[i - 1]))
      throw Error(Errc::InvalidArgument, "dates are not strictly increasing");
  }
  require_strictly_increasing(moneyness_, "moneyness");
  require_strictly_increasing(expiry_, "expiry");
  require_strictly_increasing(tenor_, "tenor");
  const std::size_t cells =
      dates_.size() * moneyness_.size() * expiry_.size() * tenor_.size();
  if (vols_.size() != cells) {
    throw Error(Errc::ShapeMismatch, "vol array has " + std::to_string(vols_.size()) +
                                         " cells, expected " + std::to_string(cells));
  }
  for (std::size_t i = 0; i < vols_.size(); ++i) {
    if (!(vols_[i] > 0.0) || !std::isfinite(vols_[i]))
      throw Error(Errc::NonPositiveVol, "cell " + std::to_string(i) + " has vol " +
                                            format_number(vols_[i]));
  }
  if (forwards_) {
    const std::size_t fcells = dates_.size() * expiry_.size() * tenor_.size();
    if (forwards_->size() != fcells)
      throw Error(Errc::ShapeMismatch, "forward array has wrong size");
    for (double f : *forwards_) {
      if (!std::isfinite(f)) throw Error(Errc::InvalidArgument, "non-finite forward");
    }
  }
}

double VolCubeSeries::forward(std::size_t d, std::size_t e, std::size_t n) const {
  if (!forwards_) throw Error(Errc::InvalidArgument, "cube carries no forward rates");
  return (*forwards_)[(d * expiry_.size() + e) * tenor_.size() + n];
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Row {
  Date date;
  double expiry, tenor, moneyness, vol;
  std::optional<double> forward;
  std::size_t line;
};

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

}  // namespace

VolCubeSeries parse_cube_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;

  // Header; a UTF-8 BOM is tolerated.
  if (!std::getline(in, line)) throw Error(Errc::UnparseableRow, source + ": empty file");
  ++lineno;
  std::string_view header = trim(line);
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  bool with_forward = false;
  if (header == "date,expiry_years,tenor_years,moneyness,vol") {
    with_forward = false;
  } else if (header == "date,expiry_years,tenor_years,moneyness,vol,forward") {
    with_forward = true;
  } else {
    throw Error(Errc::UnparseableRow, where(source, 1) + ": unexpected header '" +
                                          std::string(header) + "'");
  }
  const std::size_t ncols = with_forward ? 6 : 5;

  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != ncols) {
      throw Error(Errc::UnparseableRow, where(source, lineno) + ": expected " +
                                            std::to_string(ncols) + " fields, got " +
                                            std::to_string(fields.size()));
    }
    Row r{};
    r.line = lineno;
    try {
      r.date = Date::parse(fields[0]);
    } catch (const Error& e) {
      throw Error(Errc::UnparseableRow, where(source, lineno) + ": " + e.what());
    }
    double* targets[] = {&r.expiry, &r.tenor, &r.moneyness, &r.vol};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!parse_number(fields[k + 1], *targets[k]) || !std::isfinite(*targets[k])) {
        throw Error(Errc::UnparseableRow, where(source, lineno) + ": bad number '" +
                                              std::string(fields[k + 1]) + "'");
      }
    }
    if (with_forward) {
      double f = 0.0;
      if (!parse_number(fields[5], f) || !std::isfinite(f)) {
        throw Error(Errc::UnparseableRow, where(source, lineno) + ": bad forward '" +
                                              std::string(fields[5]) + "'");
      }
      r.forward = f;
    }
    if (!(r.vol > 0.0)) {
      throw Error(Errc::NonPositiveVol, where(source, lineno) + ": line " +
                                            std::to_string(lineno) + " has vol " +
                                            format_number(r.vol));
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw Error(Errc::TooFewDates, source + ": no data rows");

  std::set<Date> date_set;
  std::set<double> m_set, e_set, n_set;
  for (const auto& r : rows) {
    date_set.insert(r.date);
    m_set.insert(r.moneyness);
    e_set.insert(r.expiry);
    n_set.insert(r.tenor);
  }
  std::vector<Date> dates(date_set.begin(), date_set.end());
  std::vector<double> mg(m_set.begin(), m_set.end());
  std::vector<double> eg(e_set.begin(), e_set.end());
  std::vector<double> ng(n_set.begin(), n_set.end());

  auto index_of = [](const auto& grid, const auto& v) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), v) -
                                    grid.begin());
  };

  const std::size_t nm = mg.size(), ne = eg.size(), nn = ng.size();
  std::vector<double> vols(dates.size() * nm * ne * nn, 0.0);
  std::vector<std::size_t> seen(vols.size(), 0);  // line number, 0 = missing
  std::vector<double> fwds(dates.size() * ne * nn, 0.0);
  std::vector<std::size_t> fwd_line(fwds.size(), 0);

  for (const auto& r : rows) {
    const std::size_t d = index_of(dates, r.date);
    const std::size_t m = index_of(mg, r.moneyness);
    const std::size_t e = index_of(eg, r.expiry);
    const std::size_t n = index_of(ng, r.tenor);
    const std::size_t cell = ((d * nm + m) * ne + e) * nn + n;
    if (seen[cell] != 0) {
      throw Error(Errc::DuplicateRow, where(source, r.line) + ": duplicates line " +
                                          std::to_string(seen[cell]));
    }
    seen[cell] = r.line;
    vols[cell] = r.vol;
    if (r.forward) {
      const std::size_t fc = (d * ne + e) * nn + n;
      if (fwd_line[fc] != 0 && fwds[fc] != *r.forward) {
        throw Error(Errc::InconsistentForward,
                    where(source, r.line) + ": forward differs from line " +
                        std::to_string(fwd_line[fc]));
      }
      fwds[fc] = *r.forward;
      fwd_line[fc] = r.line;
    }
  }

  for (std::size_t d = 0; d < dates.size(); ++d) {
    std::size_t first_line = 0;
    for (std::size_t c = d * nm * ne * nn; c < (d + 1) * nm * ne * nn; ++c) {
      if (seen[c] != 0 && (first_line == 0 || seen[c] < first_line)) first_line = seen[c];
    }
    for (std::size_t m = 0; m < nm; ++m)
      for (std::size_t e = 0; e < ne; ++e)
        for (std::size_t n = 0; n < nn; ++n) {
          const std::size_t cell = ((d * nm + m) * ne + e) * nn + n;
          if (seen[cell] == 0) {
            throw Error(Errc::MissingCell,
                        source + ": date " + dates[d].iso() + " (first seen on line " +
                            std::to_string(first_line) + ") lacks moneyness=" +
                            format_number(mg[m]) + " expiry=" + format_number(eg[e]) +
                            " tenor=" + format_number(ng[n]));
          }
        }
  }

  std::optional<std::vector<double>> forwards;
  if (with_forward) forwards = std::move(fwds);
  return VolCubeSeries(std::move(dates), std::move(mg), std::move(eg), std::move(ng),
                       std::move(vols), std::move(forwards));
}

VolCubeSeries load_cube_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  return parse_cube_csv(in, path.string());
}

void write_cube_csv(const VolCubeSeries& cube, std::ostream& out) {
  out << "date,expiry_years,tenor_years,moneyness,vol";
  if (cube.has_forwards()) out << ",forward";
  out << '\n';
  const auto [nd, nm, ne, nn] = cube.shape();
  for (std::size_t d = 0; d < nd; ++d) {
    const std::string date = cube.dates()[d].iso();
    for (std::size_t e = 0; e < ne; ++e)
      for (std::size_t n = 0; n < nn; ++n)
        for (std::size_t m = 0; m < nm; ++m) {
          out << date << ',' << format_number(cube.expiry_grid()[e]) << ','
              << format_number(cube.tenor_grid()[n]) << ','
              << format_number(cube.moneyness_grid()[m]) << ','
              << format_number(cube.vol(d, m, e, n));
          if (cube.has_forwards()) out << ',' << format_number(cube.forward(d, e, n));
          out << '\n';
        }
  }
}

// ---------------------------------------------------------------------------
// Slicing and returns

std::optional<std::size_t> find_on_grid(const std::vector<double>& grid, double value) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - value) <= 1e-12 * std::max(1.0, std::abs(value))) return i;
  }
  return std::nullopt;
}

namespace {

std::size_t fixed_index(const std::vector<double>& grid, const std::optional<double>& v,
                        const char* name) {
  if (!v) {
    if (grid.size() == 1) return 0;
    throw Error(Errc::OffGridCoordinate,
                std::string("slice needs a fixed ") + name + " coordinate");
  }
  auto idx = find_on_grid(grid, *v);
  if (!idx) {
    throw Error(Errc::OffGridCoordinate,
                std::string(name) + "=" + format_number(*v) + " is not on the grid");
  }
  return *idx;
}

}  // namespace

FieldSeries extract_slice(const VolCubeSeries& cube, const SliceSpec& spec) {
  const auto [nd, nm, ne, nn] = cube.shape();
  FieldSeries fs;
  fs.dates = cube.dates();

  switch (spec.axis) {
    case Axis::Moneyness: {
      const auto e = fixed_index(cube.expiry_grid(), spec.expiry, "expiry");
      const auto n = fixed_index(cube.tenor_grid(), spec.tenor, "tenor");
      fs.grid = make_grid_1d("moneyness", "decimal", cube.moneyness_grid());
      fs.values = Matrix(nd, nm);
      for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t m = 0; m < nm; ++m) fs.values(d, m) = cube.vol(d, m, e, n);
      break;
    }
    case Axis::Expiry: {
      const auto m = fixed_index(cube.moneyness_grid(), spec.moneyness, "moneyness");
      const auto n = fixed_index(cube.tenor_grid(), spec.tenor, "tenor");
      fs.grid = make_grid_1d("expiry", "years", cube.expiry_grid());
      fs.values = Matrix(nd, ne);
      for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t e = 0; e < ne; ++e) fs.values(d, e) = cube.vol(d, m, e, n);
      break;
    }
    case Axis::Tenor: {
      const auto m = fixed_index(cube.moneyness_grid(), spec.moneyness, "moneyness");
      const auto e = fixed_index(cube.expiry_grid(), spec.expiry, "expiry");
      fs.grid = make_grid_1d("tenor", "years", cube.tenor_grid());
      fs.values = Matrix(nd, nn);
      for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t n = 0; n < nn; ++n) fs.values(d, n) = cube.vol(d, m, e, n);
      break;
    }
    case Axis::ExpiryTenor: {
      const auto m = fixed_index(cube.moneyness_grid(), spec.moneyness, "moneyness");
      fs.grid = Grid{{GridAxis{"expiry", "years", cube.expiry_grid()},
                      GridAxis{"tenor", "years", cube.tenor_grid()}}};
      fs.values = Matrix(nd, ne * nn);
      for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t e = 0; e < ne; ++e)
          for (std::size_t n = 0; n < nn; ++n)
            fs.values(d, e * nn + n) = cube.vol(d, m, e, n);
      break;
    }
  }
  return fs;
}

ReturnField log_returns(const FieldSeries& fs) {
  const std::size_t nd = fs.values.rows();
  const std::size_t np = fs.values.cols();
  if (nd < 2) throw Error(Errc::TooFewDates, "log returns need at least 2 dates");
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t p = 0; p < np; ++p)
      if (!(fs.values(d, p) > 0.0))
        throw Error(Errc::NonPositiveValue, "value at date " + fs.dates[d].iso() +
                                                " point " + std::to_string(p) +
                                                " is not positive");
  ReturnField rf;
  rf.field.dates.assign(fs.dates.begin() + 1, fs.dates.end());
  rf.field.grid = fs.grid;
  rf.field.values = Matrix(nd - 1, np);
  for (std::size_t d = 1; d < nd; ++d)
    for (std::size_t p = 0; p < np; ++p)
      rf.field.values(d - 1, p) = std::log(fs.values(d, p)) - std::log(fs.values(d - 1, p));
  return rf;
}

ReturnField center(const ReturnField& rf) {
  if (rf.centered) throw Error(Errc::AlreadyCentered, "field is already centered");
  const std::size_t nd = rf.field.values.rows();
  const std::size_t np = rf.field.values.cols();
  if (nd == 0) throw Error(Errc::TooFewDates, "cannot center an empty field");
  ReturnField out = rf;
  out.mean_function.assign(np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    double s = 0.0;
    for (std::size_t d = 0; d < nd; ++d) s += rf.field.values(d, p);
    const double mean = s / static_cast<double>(nd);
    out.mean_function[p] = mean;
    for (std::size_t d = 0; d < nd; ++d) out.field.values(d, p) = rf.field.values(d, p) - mean;
  }
  out.centered = true;
  return out;
}

FieldSeries uncenter(const ReturnField& rf) {
  FieldSeries fs = rf.field;
  if (!rf.centered) return fs;
  for (std::size_t d = 0; d < fs.values.rows(); ++d)
    for (std::size_t p = 0; p < fs.values.cols(); ++p) fs.values(d, p) += rf.mean_function[p];
  return fs;
}

}  // namespace smilerisk
