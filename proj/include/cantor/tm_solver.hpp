#pragma once

#include <cstddef>

#include "cantor/fd_solver.hpp"
#include "cantor/potential.hpp"
#include "cantor/spectrum.hpp"

namespace cantor {

/// (psi, psi') carried across the segments, plus interior sign changes.
struct ShootingState {
  double psi = 0.0;
  double dpsi = 1.0;
  std::size_t node_count = 0;
};

/// psi(1) of the solution with psi(0) = 0, psi'(0) = 1, and its interior
/// zero count. Zeros of `value` are the Dirichlet eigenvalues; `nodes` is
/// the number of eigenvalues strictly below eps.
struct Mismatch {
  double value = 0.0;
  std::size_t nodes = 0;
};

/// Whether (psi, psi') is divided by its max magnitude after every segment.
/// Only the magnitude of the mismatch depends on it, never its sign or the
/// node count; `no` exists for checking exactly that and overflows for
/// large mu.
enum class Renormalize { yes, no };

/// Exact propagation of -(1/mu^2) psi'' + v_j psi = eps psi across the
/// piecewise-constant segments.
Mismatch tm_mismatch(const PiecewisePotential& p, const ModelParams& params, double eps,
                     Renormalize renormalize = Renormalize::yes);

/// Number of eigenvalues strictly below eps, from the oscillation theorem.
std::size_t tm_node_count(const PiecewisePotential& p, const ModelParams& params, double eps);

/// All eigenvalues in (lo, hi]: node-count bisection until each root is
/// isolated, then bisection on the mismatch sign down to width <= tol.
/// Throws DomainError unless lo < hi and tol > 0.
Spectrum tm_eigenvalues(const PiecewisePotential& p, const ModelParams& params, double lo, double hi,
                        double tol = kDefaultTolerance);

/// Distance below which tm_eigenfunction accepts a supplied eigenvalue.
inline constexpr double kStaleEigenvalueTolerance = 1e-6;

/// Eigenfunction sampled at x_i = i / (sample_count + 1), i = 1..sample_count
/// (the FD nodes of a grid with n = sample_count), normalized and sign-fixed
/// like the FD states.
///
/// eps is first polished to full precision against the node count, then
/// the state is taken as the null vector of the segment-coefficient
/// system (continuity of psi and psi' at every breakpoint plus both walls)
/// with decaying exponentials under barriers, which stays well conditioned
/// where one-sided shooting would amplify errors exponentially.
///
/// Throws DomainError when no eigenvalue lies within
/// kStaleEigenvalueTolerance of eps or the coefficient system is not
/// singular to that relative tolerance.
Wavefunction tm_eigenfunction(const PiecewisePotential& p, const ModelParams& params, double eps,
                              std::size_t sample_count);

namespace serial {

Spectrum tm_eigenvalues(const PiecewisePotential& p, const ModelParams& params, double lo, double hi,
                        double tol = kDefaultTolerance);

}  // namespace serial

}  // namespace cantor
