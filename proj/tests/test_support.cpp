#include "test_support.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

using namespace smilerisk;

namespace testing_support {

std::vector<Date> dates(std::size_t n) { return business_days(Date(2020, 1, 1), n); }

ReturnField returns_on(const Grid& grid, const std::vector<std::vector<double>>& rows) {
  ReturnField rf;
  rf.field.grid = grid;
  rf.field.dates = dates(rows.size());
  rf.field.values = Matrix(rows.size(), grid.size());
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t j = 0; j < grid.size(); ++j) rf.field.values(t, j) = rows[t][j];
  return rf;
}

ReturnField synthetic_returns(std::size_t n_dates, std::uint64_t seed) {
  SynthSpec spec = default_synth_spec();
  spec.n_dates = n_dates;
  spec.seed = seed;
  const Matrix modes = make_orthonormal_modes(spec.grid, spec.n_modes());
  const VolCubeSeries cube = synthesize_cube(spec, modes, simulate_projections(spec));
  SliceSpec s;
  s.expiry = 10.0;
  s.tenor = 10.0;
  return log_returns(extract_slice(cube, s));
}

double l2_distance(const Grid& grid, const std::vector<double>& f, const std::vector<double>& g) {
  std::vector<double> d(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) d[i] = f[i] - g[i];
  return std::sqrt(inner_product(grid, d, d));
}

double l2_distance_up_to_sign(const Grid& grid, const std::vector<double>& f,
                              const std::vector<double>& g) {
  std::vector<double> flipped(g);
  if (inner_product(grid, f, g) < 0.0)
    for (auto& v : flipped) v = -v;
  return l2_distance(grid, f, flipped);
}

double sample_corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("smilerisk_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testing_support
