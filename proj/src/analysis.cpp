#include "cantor/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bisection.hpp"
#include "cantor/error.hpp"
#include "cantor/parallel.hpp"
#include "cantor/tm_solver.hpp"

namespace cantor {

EigenvalueCounter fd_counter(const TridiagonalHamiltonian& h) {
  return [&h](double eps) { return sturm_count(h, eps); };
}

EigenvalueCounter tm_counter(PiecewisePotential p, ModelParams params) {
  return [p = std::move(p), params](double eps) { return tm_node_count(p, params, eps); };
}

namespace {

template <bool Parallel>
StaircaseData staircase_impl(const EigenvalueCounter& counter, double lo, double hi,
                             std::size_t resolution) {
  if (!(lo < hi)) throw DomainError("staircase range requires lo < hi");
  if (resolution == 0) throw DomainError("staircase resolution must be positive");
  StaircaseData out;
  out.energies.resize(resolution + 1);
  out.counts.resize(resolution + 1);
  const double width = hi - lo;
  const auto steps = static_cast<double>(resolution);
  for (std::size_t i = 0; i <= resolution; ++i) {
    out.energies[i] = i == resolution ? hi : lo + width * (static_cast<double>(i) / steps);
  }
  const auto body = [&](std::ptrdiff_t i) {
    out.counts[i] = counter(detail::next_up(out.energies[i]));
  };
  if constexpr (Parallel) {
    parallel_for(static_cast<std::ptrdiff_t>(resolution + 1), body);
  } else {
    serial_for(static_cast<std::ptrdiff_t>(resolution + 1), body);
  }
  return out;
}

}  // namespace

StaircaseData staircase(const EigenvalueCounter& counter, double lo, double hi, std::size_t resolution) {
  return staircase_impl<true>(counter, lo, hi, resolution);
}

std::size_t ClusterReport::multi_member_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(clusters.begin(), clusters.end(), [](const IndexRange& r) { return r.size() > 1; }));
}

double ClusterReport::max_intra_gap(const Spectrum& s) const {
  double gap = 0.0;
  for (const auto& r : clusters) {
    for (std::size_t k = r.first + 1; k <= r.last; ++k) gap = std::max(gap, s[k] - s[k - 1]);
  }
  return gap;
}

double ClusterReport::min_inter_gap(const Spectrum& s) const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t c = 1; c < clusters.size(); ++c) {
    gap = std::min(gap, s[clusters[c].first] - s[clusters[c - 1].last]);
  }
  return gap;
}

ClusterReport detect_clusters(const Spectrum& s, double gap_threshold) {
  if (!(gap_threshold > 0.0)) throw DomainError("gap threshold must be positive");
  ClusterReport report;
  report.gap_threshold = gap_threshold;
  if (s.empty()) return report;
  IndexRange current{0, 0};
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] - s[k - 1] > gap_threshold) {
      report.clusters.push_back(current);
      current = {k, k};
    } else {
      current.last = k;
    }
  }
  report.clusters.push_back(current);
  return report;
}

double geometric_gap_threshold(const Spectrum& s) {
  double smallest = std::numeric_limits<double>::infinity();
  double largest = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double gap = s[k] - s[k - 1];
    if (gap > 0.0) {
      smallest = std::min(smallest, gap);
      largest = std::max(largest, gap);
    }
  }
  if (!(largest > 0.0)) throw DomainError("need at least two distinct eigenvalues");
  return std::sqrt(smallest * largest);
}

double participation_ratio(const Wavefunction& psi) {
  if (psi.values.empty() || !(std::abs(psi.norm_squared() - 1.0) <= 1e-9)) {
    throw DomainError("participation ratio needs a normalized state");
  }
  double sum4 = 0.0;
  for (double v : psi.values) sum4 += (v * v) * (v * v);
  return 1.0 / (psi.spacing * sum4);
}

std::vector<double> segment_masses(const Wavefunction& psi, const PiecewisePotential& p) {
  std::vector<double> mass(p.segment_count(), 0.0);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    mass[p.segment_index(psi.node(i))] += psi.values[i] * psi.values[i];
  }
  for (double& m : mass) m *= psi.spacing;
  return mass;
}

double well_mass_fraction(const Wavefunction& psi, const PiecewisePotential& p) {
  const auto mass = segment_masses(psi, p);
  const double well = p.min_value();
  double inside = 0.0;
  for (std::size_t j = 0; j < mass.size(); ++j) {
    if (p.values()[j] == well) inside += mass[j];
  }
  return inside / std::accumulate(mass.begin(), mass.end(), 0.0);
}

double SweepRecord::min_eps() const noexcept {
  return spectrum.empty() ? std::numeric_limits<double>::quiet_NaN() : spectrum.eigenvalues.front();
}

double SweepRecord::max_eps() const noexcept {
  return spectrum.empty() ? std::numeric_limits<double>::quiet_NaN() : spectrum.eigenvalues.back();
}

double SweepRecord::mean_lowest_participation() const noexcept {
  if (lowest_participation.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(lowest_participation.begin(), lowest_participation.end(), 0.0) /
         static_cast<double>(lowest_participation.size());
}

namespace {

std::vector<double> participation_of(const std::vector<Wavefunction>& states) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& psi : states) out.push_back(participation_ratio(psi));
  return out;
}

SweepRecord sweep_one(const PiecewisePotential& p, double mu, const SweepOptions& options) {
  const ModelParams params(mu);
  const Grid grid = options.grid_points ? Grid(*options.grid_points) : default_grid(p, params);
  const auto h = assemble_hamiltonian(p, params, grid);

  SweepRecord rec;
  rec.mu = mu;
  rec.grid_points = grid.size();
  rec.count_below_zero = sturm_count(h, 0.0);
  rec.spectrum = serial::eigenvalues_in_range(h, options.lo, options.hi, options.tolerance);
  rec.participation = participation_of(serial::eigenvectors(h, rec.spectrum));
  const std::size_t lowest = std::min(options.lowest_states, h.size());
  if (lowest > 0) {
    const Spectrum bottom = eigenvalues_by_index(h, 1, lowest, options.tolerance);
    rec.lowest_eigenvalues = bottom.eigenvalues;
    rec.lowest_participation = participation_of(serial::eigenvectors(h, bottom));
  }
  return rec;
}

template <bool Parallel>
std::vector<SweepRecord> mu_sweep_impl(const PiecewisePotential& p, std::span<const double> mus,
                                       const SweepOptions& options) {
  if (mus.empty()) throw DomainError("mu sweep needs at least one mu");
  for (double mu : mus) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("every mu must be positive and finite");
  }
  if (!(options.lo < options.hi)) throw DomainError("energy window requires lo < hi");
  std::vector<SweepRecord> out(mus.size());
  const auto body = [&](std::ptrdiff_t i) { out[i] = sweep_one(p, mus[i], options); };
  if constexpr (Parallel) {
    parallel_for(static_cast<std::ptrdiff_t>(mus.size()), body);
  } else {
    serial_for(static_cast<std::ptrdiff_t>(mus.size()), body);
  }
  return out;
}

}  // namespace

std::vector<SweepRecord> mu_sweep(const PiecewisePotential& p, std::span<const double> mus,
                                  const SweepOptions& options) {
  return mu_sweep_impl<true>(p, mus, options);
}

namespace serial {

StaircaseData staircase(const EigenvalueCounter& counter, double lo, double hi, std::size_t resolution) {
  return staircase_impl<false>(counter, lo, hi, resolution);
}

std::vector<SweepRecord> mu_sweep(const PiecewisePotential& p, std::span<const double> mus,
                                  const SweepOptions& options) {
  return mu_sweep_impl<false>(p, mus, options);
}

}  // namespace serial

}  // namespace cantor
