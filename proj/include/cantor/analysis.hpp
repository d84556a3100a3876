#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cantor/fd_solver.hpp"
#include "cantor/potential.hpp"
#include "cantor/spectrum.hpp"

namespace cantor {

/// Number of eigenvalues strictly below the argument. Must be safe to call
/// concurrently.
using EigenvalueCounter = std::function<std::size_t(double)>;

/// Sturm counter bound to h; h must outlive the counter.
EigenvalueCounter fd_counter(const TridiagonalHamiltonian& h);
/// Node counter; owns a copy of the potential.
EigenvalueCounter tm_counter(PiecewisePotential p, ModelParams params);

/// Integrated density of states: counts[i] = number of eigenvalues <= energies[i].
struct StaircaseData {
  std::vector<double> energies;
  std::vector<std::size_t> counts;
};

/// Counts at resolution + 1 uniformly spaced energies from lo to hi,
/// evaluated in parallel. Throws DomainError unless lo < hi and
/// resolution > 0.
StaircaseData staircase(const EigenvalueCounter& counter, double lo, double hi, std::size_t resolution);

/// Inclusive index range [first, last] into a spectrum.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const noexcept { return last - first + 1; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct ClusterReport {
  std::vector<IndexRange> clusters;
  double gap_threshold = 0.0;

  std::size_t multi_member_count() const noexcept;
  /// Largest gap between neighbours inside a cluster (0 if none).
  double max_intra_gap(const Spectrum& s) const;
  /// Smallest gap between neighbouring clusters (+inf if fewer than two).
  double min_inter_gap(const Spectrum& s) const;
};

/// Greedy single pass: a new cluster starts wherever the gap to the previous
/// eigenvalue exceeds gap_threshold. Empty spectrum gives an empty report.
/// Throws DomainError unless gap_threshold > 0.
ClusterReport detect_clusters(const Spectrum& s, double gap_threshold);

/// Geometric mean of the largest and the smallest nonzero consecutive gap.
/// Exactly coincident eigenvalues (pairs split below one ulp) are skipped.
/// Throws DomainError with fewer than two distinct eigenvalues.
double geometric_gap_threshold(const Spectrum& s);

/// 1 / (h sum psi^4): the fraction of the unit well the state occupies.
/// Throws DomainError if |h sum psi^2 - 1| > 1e-9.
double participation_ratio(const Wavefunction& psi);

/// h * sum of psi^2 over the nodes owned by each segment.
std::vector<double> segment_masses(const Wavefunction& psi, const PiecewisePotential& p);

/// Probability mass inside the segments at the potential's minimum value.
double well_mass_fraction(const Wavefunction& psi, const PiecewisePotential& p);

struct SweepOptions {
  double lo = -1.0;
  double hi = 0.0;
  double tolerance = kDefaultTolerance;
  /// How many of the lowest states get participation ratios regardless of
  /// the window.
  std::size_t lowest_states = 10;
  /// Overrides default_grid for every mu.
  std::optional<std::size_t> grid_points;
};

struct SweepRecord {
  double mu = 0.0;
  std::size_t grid_points = 0;
  /// Eigenvalues strictly below 0.
  std::size_t count_below_zero = 0;
  Spectrum spectrum;
  std::vector<double> participation;
  std::vector<double> lowest_eigenvalues;
  std::vector<double> lowest_participation;

  /// NaN for an empty window.
  double min_eps() const noexcept;
  double max_eps() const noexcept;
  double mean_lowest_participation() const noexcept;
};

/// One record per mu, in input order; the mus run in parallel. Throws
/// DomainError for an empty list or a non-positive mu.
std::vector<SweepRecord> mu_sweep(const PiecewisePotential& p, std::span<const double> mus,
                                  const SweepOptions& options = {});

namespace serial {

StaircaseData staircase(const EigenvalueCounter& counter, double lo, double hi, std::size_t resolution);
std::vector<SweepRecord> mu_sweep(const PiecewisePotential& p, std::span<const double> mus,
                                  const SweepOptions& options = {});

}  // namespace serial

}  // namespace cantor
