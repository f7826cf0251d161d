#include "smilerisk/kldecomp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smilerisk/error.hpp"
#include "smilerisk/format.hpp"

namespace smilerisk {

Domain Domain::of(const Grid& grid) {
  Domain d;
  for (const auto& axis : grid.axes) {
    if (axis.points.size() < 2 || !(axis.points.front() < axis.points.back())) {
      throw Error(Errc::InvalidArgument, "axis '" + axis.name + "' needs at least 2 points");
    }
    d.bounds.emplace_back(axis.points.front(), axis.points.back());
    d.units.push_back(axis.unit);
  }
  return d;
}

double Domain::measure() const {
  double m = 1.0;
  for (auto [a, b] : bounds) m *= (b - a);
  return m;
}

std::size_t BasisSpec::size() const {
  if (degree.empty()) return 0;
  std::size_t n = 1;
  for (auto d : degree) n *= d;
  return n;
}

BasisSpec default_basis(const Grid& grid) {
  BasisSpec b;
  for (const auto& axis : grid.axes) b.degree.push_back(std::min<std::size_t>(8, axis.points.size()));
  return b;
}

double legendre_eval(int n, double z) {
  if (!(z >= -1.0 && z <= 1.0)) {
    throw Error(Errc::OutOfDomain, "Legendre argument " + format_number(z) + " outside [-1,1]");
  }
  if (n < 0) throw Error(Errc::InvalidArgument, "negative Legendre degree");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = z;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0) * z * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> trapezoid_weights(std::span<const double> points) {
  const std::size_t n = points.size();
  if (n < 2) throw Error(Errc::InvalidArgument, "trapezoid rule needs at least 2 points");
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = points[i + 1] - points[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

std::vector<double> quadrature_weights(const Grid& grid) {
  std::vector<double> w{1.0};
  for (const auto& axis : grid.axes) {
    const auto wa = trapezoid_weights(axis.points);
    std::vector<double> next;
    next.reserve(w.size() * wa.size());
    for (double outer : w)
      for (double inner : wa) next.push_back(outer * inner);
    w = std::move(next);
  }
  return w;
}

double integrate(const Grid& grid, std::span<const double> values) {
  const auto w = quadrature_weights(grid);
  if (values.size() != w.size()) throw Error(Errc::ShapeMismatch, "integrand size != grid size");
  return std::inner_product(w.begin(), w.end(), values.begin(), 0.0);
}

double inner_product(const Grid& grid, std::span<const double> f, std::span<const double> g) {
  const auto w = quadrature_weights(grid);
  if (f.size() != w.size() || g.size() != w.size())
    throw Error(Errc::ShapeMismatch, "integrand size != grid size");
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i] * g[i];
  return s;
}

namespace {

double to_reference(double x, double a, double b) {
  const double z = 2.0 * (x - a) / (b - a) - 1.0;
  return std::clamp(z, -1.0, 1.0);
}

void require_basis_fits(const Grid& grid, const BasisSpec& basis) {
  if (basis.degree.size() != grid.dims()) {
    throw Error(Errc::ShapeMismatch, "basis has " + std::to_string(basis.degree.size()) +
                                         " axes, grid has " + std::to_string(grid.dims()));
  }
  for (std::size_t k = 0; k < grid.dims(); ++k) {
    const auto n = basis.degree[k];
    if (n < 1 || n > grid.axes[k].points.size()) {
      throw Error(Errc::InvalidArgument,
                  "basis size " + std::to_string(n) + " on axis '" + grid.axes[k].name +
                      "' must lie in [1, " + std::to_string(grid.axes[k].points.size()) + "]");
    }
  }
}

}  // namespace

std::vector<double> basis_at(const Domain& domain, const BasisSpec& basis,
                             std::span<const double> coords) {
  if (coords.size() != domain.bounds.size() || basis.degree.size() != coords.size()) {
    throw Error(Errc::ShapeMismatch, "coordinate dimension mismatch");
  }
  std::vector<double> values{1.0};
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const auto [a, b] = domain.bounds[k];
    if (coords[k] < a - 1e-12 * std::abs(b - a) || coords[k] > b + 1e-12 * std::abs(b - a)) {
      throw Error(Errc::OutOfDomain, "point " + format_number(coords[k]) + " outside domain");
    }
    const double z = to_reference(coords[k], a, b);
    std::vector<double> next;
    next.reserve(values.size() * basis.degree[k]);
    for (double outer : values)
      for (std::size_t n = 0; n < basis.degree[k]; ++n)
        next.push_back(outer * legendre_eval(static_cast<int>(n), z));
    values = std::move(next);
  }
  return values;
}

Matrix basis_matrix(const Grid& grid, const BasisSpec& basis) {
  require_basis_fits(grid, basis);
  const Domain domain = Domain::of(grid);
  Matrix phi(grid.size(), basis.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto row = basis_at(domain, basis, grid.point(j));
    std::copy(row.begin(), row.end(), phi.row(j).begin());
  }
  return phi;
}

EmpiricalKernel estimate_kernel(const ReturnField& rf) {
  if (!rf.centered) throw Error(Errc::NotCentered, "kernel estimation needs a centered field");
  const Matrix& u = rf.field.values;
  const std::size_t t_count = u.rows();
  const std::size_t np = u.cols();
  if (t_count < 2) throw Error(Errc::TooFewSamples, "kernel estimation needs T >= 2");

  EmpiricalKernel k{rf.field.grid, Matrix(np, np), t_count};
  const double inv_t = 1.0 / static_cast<double>(t_count);
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t l = j; l < np; ++l) {
      double s = 0.0;
      for (std::size_t t = 0; t < t_count; ++t) s += u(t, j) * u(t, l);
      k.values(j, l) = s * inv_t;
      k.values(l, j) = k.values(j, l);
    }
  }
  return k;
}

GalerkinSystem assemble_galerkin(const EmpiricalKernel& kernel, const BasisSpec& basis) {
  const Grid& grid = kernel.grid;
  for (const auto& axis : grid.axes) {
    if (axis.points.size() < 2)
      throw Error(Errc::InvalidArgument, "Galerkin assembly needs >= 2 points per axis");
  }
  const Matrix phi = basis_matrix(grid, basis);
  const auto w = quadrature_weights(grid);
  const std::size_t np = grid.size();
  const std::size_t nb = basis.size();

  Matrix weighted(np, nb);  // w_j φ_n(x_j)
  for (std::size_t j = 0; j < np; ++j)
    for (std::size_t n = 0; n < nb; ++n) weighted(j, n) = w[j] * phi(j, n);

  const Matrix kw = kernel.values * weighted;  // Σ_k k̂(x_j,x_k) w_k φ_n(x_k)
  GalerkinSystem sys{Matrix(nb, nb), Matrix(nb, nb)};
  for (std::size_t m = 0; m < nb; ++m) {
    for (std::size_t n = m; n < nb; ++n) {
      double a = 0.0;
      double b = 0.0;
      for (std::size_t j = 0; j < np; ++j) {
        a += weighted(j, m) * kw(j, n);
        b += weighted(j, m) * phi(j, n);
      }
      sys.a(m, n) = sys.a(n, m) = a;
      sys.b(m, n) = sys.b(n, m) = b;
    }
  }

  const auto beig = jacobi_eigen(sys.b);
  const double largest = beig.values.front();
  const double smallest = beig.values.back();
  if (!(smallest > 0.0) || largest / smallest > 1e12) {
    throw Error(Errc::SingularB, "Gram matrix condition estimate " +
                                     format_number(smallest > 0.0 ? largest / smallest : INFINITY) +
                                     " exceeds 1e12; lower the basis degree");
  }
  return sys;
}

std::vector<GeneralizedEigenpair> solve_gevp(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n) {
    throw Error(Errc::ShapeMismatch, "generalized eigenproblem needs square A, B of equal size");
  }
  const Matrix l = cholesky(b);

  // C = L⁻¹·A·L⁻ᵀ. Y = L⁻¹A column by column, then C = L⁻¹·Yᵀ (A symmetric).
  Matrix y(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = forward_substitute(l, a.col(j));
    for (std::size_t i = 0; i < n; ++i) y(i, j) = col[i];
  }
  Matrix c(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto yt_col = y.row(j);  // column j of Yᵀ
    const auto col = forward_substitute(l, std::vector<double>(yt_col.begin(), yt_col.end()));
    for (std::size_t i = 0; i < n; ++i) c(i, j) = col[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) c(i, j) = c(j, i) = 0.5 * (c(i, j) + c(j, i));

  const auto eig = jacobi_eigen(c, 1e-12, 100);

  std::vector<GeneralizedEigenpair> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k].value = eig.values[k];
    out[k].vector = back_substitute_transposed(l, eig.vectors.col(k));
  }
  return out;
}

KLModel decompose(const ReturnField& rf, const BasisSpec& basis, std::size_t n_modes) {
  if (n_modes == 0 || n_modes > basis.size()) {
    throw Error(Errc::InvalidArgument, "n_modes must lie in [1, basis size = " +
                                           std::to_string(basis.size()) + "]");
  }
  const auto kernel = estimate_kernel(rf);
  const auto sys = assemble_galerkin(kernel, basis);
  auto pairs = solve_gevp(sys.a, sys.b);

  KLModel model;
  model.domain = Domain::of(rf.field.grid);
  model.basis = basis;
  model.grid = rf.field.grid;
  model.mean_function = rf.mean_function;

  double scale = 0.0;
  for (const auto& p : pairs) scale = std::max(scale, std::abs(p.value));
  const double clip = 1e-10 * scale;
  for (auto& p : pairs) {
    if (p.value < 0.0) {
      if (p.value < -clip) {
        throw Error(Errc::IndefiniteKernel,
                    "eigenvalue " + format_number(p.value) + " below the clipping tolerance");
      }
      p.value = 0.0;
    }
    model.spectrum.push_back(p.value);
  }

  const Matrix phi = basis_matrix(model.grid, basis);
  const auto w = quadrature_weights(model.grid);
  for (std::size_t i = 0; i < n_modes; ++i) {
    EigenMode mode;
    mode.eigenvalue = pairs[i].value;
    mode.coeffs = pairs[i].vector;
    mode.samples = phi * std::span<const double>(mode.coeffs);

    const double integral =
        std::inner_product(w.begin(), w.end(), mode.samples.begin(), 0.0);
    bool flip = false;
    if (std::abs(integral) >= 1e-10) {
      flip = integral < 0.0;
    } else {
      for (double v : mode.samples) {
        if (std::abs(v) > 1e-10) {
          flip = v < 0.0;
          break;
        }
      }
    }
    if (flip) {
      for (auto& c : mode.coeffs) c = -c;
      for (auto& s : mode.samples) s = -s;
    }
    model.modes.push_back(std::move(mode));
  }
  return model;
}

double eigenfunction_at(const KLModel& model, std::size_t mode, std::span<const double> coords) {
  if (mode >= model.modes.size()) throw Error(Errc::ShapeMismatch, "mode index out of range");
  const auto phi = basis_at(model.domain, model.basis, coords);
  const auto& d = model.modes[mode].coeffs;
  return std::inner_product(phi.begin(), phi.end(), d.begin(), 0.0);
}

ProjectionSeries project(const ReturnField& rf, const KLModel& model) {
  if (!rf.centered) throw Error(Errc::NotCentered, "projection needs a centered field");
  if (!(rf.field.grid == model.grid)) {
    throw Error(Errc::GridMismatch, "return field grid differs from the model grid");
  }
  const std::size_t nm = model.modes.size();
  std::vector<double> inv_sqrt(nm);
  for (std::size_t i = 0; i < nm; ++i) {
    const double lambda = model.modes[i].eigenvalue;
    if (!(lambda > 0.0)) {
      throw Error(Errc::ZeroEigenvalue, "mode " + std::to_string(i + 1) +
                                            " has zero eigenvalue and cannot be projected");
    }
    inv_sqrt[i] = 1.0 / std::sqrt(lambda);
  }
  const auto w = quadrature_weights(model.grid);
  const Matrix& u = rf.field.values;

  ProjectionSeries ps{rf.field.dates, Matrix(u.rows(), nm)};
  for (std::size_t t = 0; t < u.rows(); ++t) {
    const auto ut = u.row(t);
    for (std::size_t i = 0; i < nm; ++i) {
      const auto& e = model.modes[i].samples;
      double s = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * ut[j] * e[j];
      ps.xi(t, i) = s * inv_sqrt[i];
    }
  }
  return ps;
}

std::vector<double> reconstruct(const KLModel& model, std::span<const double> xi,
                                std::size_t n_modes) {
  if (n_modes > model.modes.size() || xi.size() < n_modes) {
    throw Error(Errc::ShapeMismatch, "reconstruction asks for more modes than available");
  }
  std::vector<double> field(model.grid.size(), 0.0);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double amp = std::sqrt(model.modes[i].eigenvalue) * xi[i];
    const auto& e = model.modes[i].samples;
    for (std::size_t j = 0; j < field.size(); ++j) field[j] += amp * e[j];
  }
  return field;
}

std::vector<double> explained_variance(const KLModel& model) {
  const double total = std::accumulate(model.spectrum.begin(), model.spectrum.end(), 0.0);
  if (!(total > 0.0)) throw Error(Errc::AllZeroSpectrum, "spectrum sums to zero");
  std::vector<double> shares;
  for (const auto& m : model.modes) shares.push_back(m.eigenvalue / total);
  return shares;
}

}  // namespace smilerisk
