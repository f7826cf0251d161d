#pragma once

#include <gtest/gtest.h>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "smilerisk/error.hpp"
#include "smilerisk/kldecomp.hpp"
#include "smilerisk/synthmarket.hpp"
#include "smilerisk/volgrid.hpp"

// Fails unless `stmt` throws smilerisk::Error with the given code.
#define EXPECT_ERRC(stmt, errc)                                                  \
  do {                                                                           \
    try {                                                                        \
      stmt;                                                                      \
      ADD_FAILURE() << "expected " << smilerisk::to_string(errc) << ", no throw"; \
    } catch (const smilerisk::Error& e_) {                                       \
      EXPECT_EQ(e_.code(), errc) << e_.what();                                   \
    }                                                                            \
  } while (0)

namespace testing_support {

std::vector<smilerisk::Date> dates(std::size_t n);

/// Uncentered return field with rows u(t,·) on `grid`.
smilerisk::ReturnField returns_on(const smilerisk::Grid& grid,
                                  const std::vector<std::vector<double>>& rows);

/// Log-return field of the default synthetic market (moneyness smile).
smilerisk::ReturnField synthetic_returns(std::size_t n_dates, std::uint64_t seed);

/// ∫(f − g)² on the grid, square-rooted.
double l2_distance(const smilerisk::Grid& grid, const std::vector<double>& f,
                   const std::vector<double>& g);

/// l2_distance after flipping g to the sign that matches f.
double l2_distance_up_to_sign(const smilerisk::Grid& grid, const std::vector<double>& f,
                              const std::vector<double>& g);

double sample_corr(const std::vector<double>& a, const std::vector<double>& b);

/// Fresh empty directory under the system temp directory.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& p);

}  // namespace testing_support
