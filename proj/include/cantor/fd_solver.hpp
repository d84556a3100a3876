#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cantor/potential.hpp"
#include "cantor/spectrum.hpp"

namespace cantor {

/// Default absolute bisection tolerance in eps.
inline constexpr double kDefaultTolerance = 1e-10;

/// Uniform grid of n interior nodes x_i = i h, i = 1..n, h = 1 / (n + 1).
class Grid {
 public:
  /// Throws ValidationError for n = 0.
  explicit Grid(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  /// Position of the 0-based node i, i.e. (i + 1) h.
  double node(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h_; }

 private:
  std::size_t n_;
  double h_;
};

/// n + 1 = max(2000, 30 * ceil(1 / narrowest segment) * ceil(mu / 100)),
/// rounded up to a multiple of 1 / narrowest segment when that is an
/// integer. For the middle-thirds construction of order N this puts >= 30
/// nodes in every finest well and every breakpoint on a node.
Grid default_grid(const PiecewisePotential& p, const ModelParams& params);

/// Three-point discretization of -(1/mu^2) psi'' + v psi with Dirichlet
/// walls: diagonal 2c + v(x_i), constant off-diagonal -c, c = 1/(mu h)^2.
///
/// The kinetic scale and the potential samples are kept apart so the Sturm
/// recurrence can run in scaled form.
class TridiagonalHamiltonian {
 public:
  TridiagonalHamiltonian(Grid grid, ModelParams params, std::vector<double> potential_samples);

  std::size_t size() const noexcept { return samples_.size(); }
  const Grid& grid() const noexcept { return grid_; }
  const ModelParams& params() const noexcept { return params_; }

  /// c = 1 / (mu h)^2.
  double kinetic_scale() const noexcept { return c_; }
  double diag(std::size_t i) const noexcept { return 2.0 * c_ + samples_[i]; }
  double offdiag() const noexcept { return -c_; }
  std::span<const double> potential_samples() const noexcept { return samples_; }

  /// Gershgorin enclosure [min v, max v + 4c] of the whole spectrum.
  std::pair<double, double> gershgorin_bounds() const noexcept;
  /// Infinity norm, 2c + max|2c + v_i|.
  double norm_inf() const noexcept;

  /// y = H x.
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  Grid grid_;
  ModelParams params_;
  double c_;
  std::vector<double> samples_;
};

/// How the diagonal picks up v at node x_i.
enum class Sampling {
  /// Exact mean of v over the cell [x_i - h/2, x_i + h/2]. Equals v(x_i)
  /// away from breakpoints, keeps mirror-symmetric potentials symmetric on
  /// the grid, and converges at second order across jumps.
  cell_average,
  /// v(x_i) with the half-open segment convention. First order across
  /// jumps.
  point,
};

TridiagonalHamiltonian assemble_hamiltonian(const PiecewisePotential& p, const ModelParams& params,
                                            const Grid& grid, Sampling sampling = Sampling::cell_average);

/// Mean of v over [a, b] within [0, 1]; exactly the segment value when
/// [a, b] lies inside one segment.
double cell_average(const PiecewisePotential& p, double a, double b);

/// Number of eigenvalues strictly below eps (negative pivots of H - eps I).
std::size_t sturm_count(const TridiagonalHamiltonian& h, double eps);

/// All eigenvalues in (lo, hi], each bisected on sturm_count to a bracket of
/// width <= tol (or to adjacent doubles). Brackets are processed in
/// parallel. Throws DomainError unless lo < hi and tol > 0.
Spectrum eigenvalues_in_range(const TridiagonalHamiltonian& h, double lo, double hi,
                              double tol = kDefaultTolerance);

/// Eigenvalues with 1-based indices first..last counted from the bottom of
/// the spectrum. Window of the result is the Gershgorin enclosure.
Spectrum eigenvalues_by_index(const TridiagonalHamiltonian& h, std::size_t first, std::size_t last,
                              double tol = kDefaultTolerance);

/// Residual threshold eigenvector() iterates to: max(1e-10, 10 tol) unless
/// the matrix is so stiff that double rounding of H psi alone exceeds it.
double residual_threshold(const TridiagonalHamiltonian& h, double tol);

/// ||H psi - eps psi||_2 / ||psi||_2 with eps = psi.energy.
double residual_norm(const TridiagonalHamiltonian& h, const Wavefunction& psi);

/// Inverse iteration with shift eps. Each iterate is Gram-Schmidt
/// orthogonalized against `orthogonal_to`. The returned energy is the
/// Rayleigh quotient. Throws ConvergenceError after 50 iterations.
Wavefunction eigenvector(const TridiagonalHamiltonian& h, double eps, double tol = kDefaultTolerance,
                         std::span<const Wavefunction> orthogonal_to = {});

/// One state per eigenvalue of s. Eigenvalues closer than the
/// orthogonalization gap form a cluster whose vectors are orthogonalized
/// against each other; clusters run in parallel.
std::vector<Wavefunction> eigenvectors(const TridiagonalHamiltonian& h, const Spectrum& s);

/// Gap below which eigenvectors() reorthogonalizes: 1e-5 ||H||_inf.
double orthogonalization_gap(const TridiagonalHamiltonian& h);

namespace serial {

// Single-threaded references for the OpenMP kernels above; identical results.
Spectrum eigenvalues_in_range(const TridiagonalHamiltonian& h, double lo, double hi,
                              double tol = kDefaultTolerance);
std::vector<Wavefunction> eigenvectors(const TridiagonalHamiltonian& h, const Spectrum& s);

}  // namespace serial

}  // namespace cantor
