#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smilerisk/linalg.hpp"
#include "smilerisk/volgrid.hpp"

namespace smilerisk {

// Karhunen-Loève (functional PCA) decomposition of centered return fields.
//
// Every integral over the domain is the composite trapezoid rule on the
// sample grid (tensor-product trapezoid for 2-D lattices). The eigenproblem
// of the covariance operator is reduced with a Legendre Galerkin basis to
// A·d = λ·B·d, which is solved by Cholesky reduction plus cyclic Jacobi.

/// Bounding interval (1-D) or rectangle (2-D) of a sample grid.
struct Domain {
  std::vector<std::pair<double, double>> bounds;
  std::vector<std::string> units;

  static Domain of(const Grid& grid);
  double measure() const;
};

/// Number of Legendre functions per axis; 2-D uses the tensor product.
struct BasisSpec {
  std::vector<std::size_t> degree;

  std::size_t size() const;
  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

/// min(8, points) functions per axis.
BasisSpec default_basis(const Grid& grid);

/// Pₙ(z) by the three-term recurrence. Throws Error(OutOfDomain) outside [−1,1].
double legendre_eval(int n, double z);

/// Composite trapezoid weights for an increasing point list (≥ 2 points).
std::vector<double> trapezoid_weights(std::span<const double> points);
/// Tensor-product trapezoid weights in lattice order.
std::vector<double> quadrature_weights(const Grid& grid);

/// ∫ f over the grid domain.
double integrate(const Grid& grid, std::span<const double> values);
/// ∫ f·g over the grid domain.
double inner_product(const Grid& grid, std::span<const double> f, std::span<const double> g);

/// Basis functions evaluated on the grid: rows are grid points, columns are
/// basis functions (first axis index outermost for 2-D).
Matrix basis_matrix(const Grid& grid, const BasisSpec& basis);
/// Basis functions at an arbitrary point of the domain.
std::vector<double> basis_at(const Domain& domain, const BasisSpec& basis,
                             std::span<const double> coords);

struct EmpiricalKernel {
  Grid grid;
  Matrix values;  // k̂(x_j, x_k)
  std::size_t sample_count = 0;
};

/// k̂(x_j,x_k) = (1/T)·Σ_t u(t,x_j)·u(t,x_k) on a centered field.
EmpiricalKernel estimate_kernel(const ReturnField& rf);

struct GalerkinSystem {
  Matrix a;
  Matrix b;
};

/// A_mn = ∬ k̂ φ_m φ_n, B_mn = ∫ φ_m φ_n (trapezoid). Throws Error(SingularB)
/// when the condition number of B exceeds 1e12.
GalerkinSystem assemble_galerkin(const EmpiricalKernel& kernel, const BasisSpec& basis);

struct GeneralizedEigenpair {
  double value = 0.0;
  std::vector<double> vector;  // B-normalized: vᵀBv = 1
};

/// Solves A·d = λ·B·d for symmetric A and symmetric positive definite B.
/// Pairs are returned with λ descending.
std::vector<GeneralizedEigenpair> solve_gevp(const Matrix& a, const Matrix& b);

struct EigenMode {
  double eigenvalue = 0.0;
  std::vector<double> coeffs;   // basis coefficients
  std::vector<double> samples;  // eigenfunction on the grid
};

struct KLModel {
  Domain domain;
  BasisSpec basis;
  Grid grid;
  std::vector<EigenMode> modes;        // λ descending, retained modes only
  std::vector<double> spectrum;        // every Galerkin eigenvalue (clipped)
  std::vector<double> mean_function;   // ū(x) of the decomposed field
};

/// estimate_kernel → assemble_galerkin → solve_gevp, then orientation: each
/// eigenfunction has positive integral, or when |∫e| < 1e-10 it is positive
/// at the first grid point where |e| > 1e-10.
KLModel decompose(const ReturnField& rf, const BasisSpec& basis, std::size_t n_modes);

/// Eigenfunction `mode` evaluated anywhere in the domain.
double eigenfunction_at(const KLModel& model, std::size_t mode, std::span<const double> coords);

struct ProjectionSeries {
  std::vector<Date> dates;
  Matrix xi;  // rows = dates, cols = modes; dimensionless

  std::vector<double> mode_series(std::size_t mode) const { return xi.col(mode); }
};

/// ξᵢ(t) = (1/√λᵢ)·∫ u(t,x)·eᵢ(x) dx.
ProjectionSeries project(const ReturnField& rf, const KLModel& model);

/// Σ_{i<n_modes} √λᵢ·ξᵢ·eᵢ(x) on the grid. The mean function is not added.
std::vector<double> reconstruct(const KLModel& model, std::span<const double> xi,
                                std::size_t n_modes);

/// λᵢ / Σⱼλⱼ for the retained modes; the sum runs over the full spectrum.
std::vector<double> explained_variance(const KLModel& model);

}  // namespace smilerisk
