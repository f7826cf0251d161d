#include <cmath>
#include <sstream>

#include "smilerisk/volgrid.hpp"
#include "test_support.hpp"

using namespace smilerisk;
using testing_support::returns_on;

namespace {

const char* kSmallCube =
    "date,expiry_years,tenor_years,moneyness,vol\n"
    "2020-01-02,10,10,-0.01,0.0071\n"
    "2020-01-02,10,10,0,0.0070\n"
    "2020-01-02,10,10,0.01,0.0072\n"
    "2020-01-03,10,10,-0.01,0.0073\n"
    "2020-01-03,10,10,0,0.0071\n"
    "2020-01-03,10,10,0.01,0.0074\n";

VolCubeSeries parse(const std::string& text) {
  std::istringstream in(text);
  return parse_cube_csv(in, "cube.csv");
}

std::string drop_line(const std::string& text, int line) {
  std::istringstream in(text);
  std::string out, l;
  for (int n = 1; std::getline(in, l); ++n)
    if (n != line) out += l + "\n";
  return out;
}

// Expiry × tenor lattice at two moneyness levels, three dates.
VolCubeSeries lattice_cube() {
  const std::vector<double> m{0.0, 0.01}, e{1.0, 5.0, 10.0}, n{2.0, 10.0};
  std::vector<double> vols;
  for (int d = 0; d < 3; ++d)
    for (double mm : m)
      for (double ee : e)
        for (double nn : n) vols.push_back(0.005 + 0.0001 * d + 0.01 * mm + 0.0001 * ee + 0.00002 * nn);
  return VolCubeSeries(testing_support::dates(3), m, e, n, vols);
}

}  // namespace

TEST(VolGridCsv, IngestsDenseCube) {
  const auto cube = parse(kSmallCube);
  const std::array<std::size_t, 4> shape{2, 3, 1, 1};
  EXPECT_EQ(cube.shape(), shape);
  EXPECT_EQ(cube.moneyness_grid(), (std::vector<double>{-0.01, 0.0, 0.01}));
  EXPECT_DOUBLE_EQ(cube.vol(1, 2, 0, 0), 0.0074);
  EXPECT_FALSE(cube.has_forwards());
  EXPECT_ERRC(cube.forward(0, 0, 0), Errc::InvalidArgument);
}

TEST(VolGridCsv, RowOrderDoesNotMatter) {
  const std::string shuffled =
      "date,expiry_years,tenor_years,moneyness,vol\n"
      "2020-01-03,10,10,0.01,0.0074\n"
      "2020-01-02,10,10,0,0.0070\n"
      "2020-01-03,10,10,-0.01,0.0073\n"
      "2020-01-02,10,10,0.01,0.0072\n"
      "2020-01-03,10,10,0,0.0071\n"
      "2020-01-02,10,10,-0.01,0.0071\n";
  EXPECT_EQ(parse(shuffled).vols(), parse(kSmallCube).vols());
}

TEST(VolGridCsv, MissingCellNamesDateAndCoordinate) {
  try {
    parse(drop_line(kSmallCube, 6));
    FAIL() << "expected MissingCell";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingCell);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2020-01-03"), std::string::npos) << msg;
    EXPECT_NE(msg.find("moneyness=0"), std::string::npos) << msg;
  }
}

TEST(VolGridCsv, NonPositiveVolNamesLine) {
  std::string text = kSmallCube;
  text.replace(text.find("0.0072"), 6, "-0.001");
  try {
    parse(text);
    FAIL() << "expected NonPositiveVol";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonPositiveVol);
    EXPECT_NE(std::string(e.what()).find("cube.csv:4"), std::string::npos) << e.what();
  }
}

TEST(VolGridCsv, DuplicateAndUnparseableRows) {
  EXPECT_ERRC(parse(std::string(kSmallCube) + "2020-01-02,10,10,0,0.0070\n"), Errc::DuplicateRow);
  EXPECT_ERRC(parse(std::string(kSmallCube) + "2020-01-04,10,10,abc,0.0070\n"), Errc::UnparseableRow);
  EXPECT_ERRC(parse(std::string(kSmallCube) + "2020-13-04,10,10,0,0.0070\n"), Errc::UnparseableRow);
  EXPECT_ERRC(parse(std::string(kSmallCube) + "2020-01-04,10,10,0\n"), Errc::UnparseableRow);
  EXPECT_ERRC(parse("date,vol\n2020-01-02,0.1\n"), Errc::UnparseableRow);
}

TEST(VolGridCsv, ForwardColumnAndConsistency) {
  const std::string text =
      "date,expiry_years,tenor_years,moneyness,vol,forward\n"
      "2020-01-02,10,10,-0.01,0.0071,0.03\n"
      "2020-01-02,10,10,0,0.0070,0.03\n"
      "2020-01-02,10,10,0.01,0.0072,0.03\n";
  const auto cube = parse(text);
  ASSERT_TRUE(cube.has_forwards());
  EXPECT_DOUBLE_EQ(cube.forward(0, 0, 0), 0.03);
  std::string bad = text;
  bad.replace(bad.rfind("0.03"), 4, "0.04");
  EXPECT_ERRC(parse(bad), Errc::InconsistentForward);
}

TEST(VolGridCsv, WriteThenReadRoundTrips) {
  const auto cube = lattice_cube();
  std::ostringstream out;
  write_cube_csv(cube, out);
  const auto back = parse(out.str());
  EXPECT_EQ(back.vols(), cube.vols());
  EXPECT_EQ(back.dates(), cube.dates());
  EXPECT_EQ(back.expiry_grid(), cube.expiry_grid());
}

TEST(VolGridCsv, MissingFileIsIoError) {
  try {
    load_cube_csv("/definitely/not/here.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoError);
    EXPECT_EQ(e.category(), ErrorCategory::Input);
    EXPECT_NE(std::string(e.what()).find("/definitely/not/here.csv"), std::string::npos);
  }
}

TEST(VolGridCube, ConstructorValidates) {
  const auto d = testing_support::dates(1);
  EXPECT_ERRC(VolCubeSeries(d, {0.0, 0.0}, {1.0}, {1.0}, {0.1, 0.1}), Errc::InvalidArgument);
  EXPECT_ERRC(VolCubeSeries(d, {0.0}, {1.0}, {1.0}, {0.0}), Errc::NonPositiveVol);
  EXPECT_ERRC(VolCubeSeries(d, {0.0}, {1.0}, {1.0}, {0.1, 0.2}), Errc::ShapeMismatch);
}

TEST(VolGridSlice, MoneynessSmileIsBitExact) {
  const auto cube = lattice_cube();
  SliceSpec s;
  s.expiry = 10.0;
  s.tenor = 10.0;
  const auto fs = extract_slice(cube, s);
  ASSERT_EQ(fs.grid.dims(), 1u);
  EXPECT_EQ(fs.grid.axes[0].name, "moneyness");
  for (std::size_t d = 0; d < 3; ++d)
    for (std::size_t m = 0; m < 2; ++m) EXPECT_EQ(fs.values(d, m), cube.vol(d, m, 2, 1));
}

TEST(VolGridSlice, SurfaceSliceUsesLatticeOrder) {
  const auto cube = lattice_cube();
  SliceSpec s;
  s.axis = Axis::ExpiryTenor;
  s.moneyness = 0.0;
  const auto fs = extract_slice(cube, s);
  ASSERT_EQ(fs.grid.dims(), 2u);
  EXPECT_EQ(fs.grid.size(), 6u);
  for (std::size_t e = 0; e < 3; ++e)
    for (std::size_t n = 0; n < 2; ++n) {
      EXPECT_EQ(fs.values(1, e * 2 + n), cube.vol(1, 0, e, n));
      EXPECT_EQ(fs.grid.point(e * 2 + n), (std::vector<double>{cube.expiry_grid()[e], cube.tenor_grid()[n]}));
    }
}

TEST(VolGridSlice, OffGridCoordinate) {
  SliceSpec s;
  s.expiry = 7.5;
  s.tenor = 10.0;
  EXPECT_ERRC(extract_slice(lattice_cube(), s), Errc::OffGridCoordinate);
  SliceSpec missing;  // expiry grid has 3 points, so it must be fixed
  missing.tenor = 10.0;
  EXPECT_ERRC(extract_slice(lattice_cube(), missing), Errc::OffGridCoordinate);
}

TEST(VolGridReturns, LogDifferences) {
  FieldSeries fs;
  fs.dates = testing_support::dates(3);
  fs.grid = make_grid_1d("moneyness", "decimal", {0.0, 1.0});
  fs.values = Matrix(3, 2);
  fs.values(0, 0) = 1.0;
  fs.values(1, 0) = std::exp(1.0);
  fs.values(2, 0) = std::exp(1.0);
  fs.values(0, 1) = 1.0;
  fs.values(1, 1) = 1.1;
  fs.values(2, 1) = 1.1;
  const auto rf = log_returns(fs);
  EXPECT_FALSE(rf.centered);
  EXPECT_TRUE(rf.mean_function.empty());
  ASSERT_EQ(rf.field.dates.size(), 2u);
  EXPECT_EQ(rf.field.dates[0], fs.dates[1]);
  EXPECT_NEAR(rf.field.values(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(rf.field.values(0, 1), 0.0953102, 1e-7);
  EXPECT_EQ(rf.field.values(1, 0), 0.0);
  EXPECT_EQ(rf.field.values(1, 1), 0.0);
}

TEST(VolGridReturns, Errors) {
  FieldSeries fs;
  fs.dates = testing_support::dates(1);
  fs.grid = make_grid_1d("moneyness", "decimal", {0.0, 1.0});
  fs.values = Matrix(1, 2, 1.0);
  EXPECT_ERRC(log_returns(fs), Errc::TooFewDates);
  fs.dates = testing_support::dates(2);
  fs.values = Matrix(2, 2, 1.0);
  fs.values(1, 1) = 0.0;
  EXPECT_ERRC(log_returns(fs), Errc::NonPositiveValue);
}

TEST(VolGridCenter, Examples) {
  const Grid g = make_grid_1d("m", "", {0.0, 1.0});
  const auto sym = center(returns_on(g, {{0.2, -0.5}, {-0.2, 0.5}}));
  EXPECT_TRUE(sym.centered);
  EXPECT_EQ(sym.mean_function, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(sym.field.values(0, 0), 0.2);

  const auto c = center(returns_on(g, {{0.1, 0.0}, {0.3, 0.0}}));
  EXPECT_NEAR(c.mean_function[0], 0.2, 1e-15);
  EXPECT_NEAR(c.field.values(0, 0), -0.1, 1e-15);
  EXPECT_NEAR(c.field.values(1, 0), 0.1, 1e-15);
  EXPECT_ERRC(center(c), Errc::AlreadyCentered);
}

TEST(VolGridCenter, UncenterRoundTripAndZeroMean) {
  const auto rf = testing_support::synthetic_returns(300, 5);
  const auto c = center(rf);
  for (std::size_t j = 0; j < c.field.grid.size(); ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < c.field.dates.size(); ++t) s += c.field.values(t, j);
    EXPECT_LT(std::abs(s / static_cast<double>(c.field.dates.size())), 1e-12);
  }
  const auto back = uncenter(c);
  for (std::size_t t = 0; t < back.dates.size(); ++t)
    for (std::size_t j = 0; j < back.grid.size(); ++j)
      EXPECT_NEAR(back.values(t, j), rf.field.values(t, j), 1e-14);
}

TEST(VolGridReturns, CumulativeExpIsInverse) {
  const Grid g = make_grid_1d("m", "", {0.0, 0.5, 1.0});
  const std::vector<std::vector<double>> u{{0.01, -0.02, 0.0}, {0.03, 0.0, -0.01}, {-0.04, 0.02, 0.01}};
  const auto c = center(returns_on(g, u));
  FieldSeries levels;
  levels.grid = g;
  levels.dates = testing_support::dates(4);
  levels.values = Matrix(4, 3, 1.0);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t j = 0; j < 3; ++j) levels.values(t + 1, j) = levels.values(t, j) * std::exp(c.field.values(t, j));
  const auto back = log_returns(levels);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(back.field.values(t, j), c.field.values(t, j), 1e-12);
}

TEST(VolGridAxis, ParseAndPrint) {
  for (Axis a : {Axis::Moneyness, Axis::Expiry, Axis::Tenor, Axis::ExpiryTenor})
    EXPECT_EQ(parse_axis(to_string(a)), a);
  EXPECT_ERRC(parse_axis("strike"), Errc::ConfigError);
}

TEST(VolGridDate, ParseStrict) {
  EXPECT_EQ(Date::parse("2016-02-29").iso(), "2016-02-29");
  EXPECT_ERRC(Date::parse("2015-02-29"), Errc::InvalidArgument);
  EXPECT_ERRC(Date::parse("2015-2-01"), Errc::InvalidArgument);
  EXPECT_ERRC(Date::parse("2015-02-01x"), Errc::InvalidArgument);
}
