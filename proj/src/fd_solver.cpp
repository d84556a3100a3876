#include "cantor/fd_solver.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "bisection.hpp"
#include "cantor/error.hpp"
#include "cantor/parallel.hpp"

namespace cantor {

Grid::Grid(std::size_t n) : n_(n), h_(0.0) {
  if (n == 0) throw ValidationError("invalid grid: at least one interior node required");
  h_ = 1.0 / static_cast<double>(n + 1);
}

Grid default_grid(const PiecewisePotential& p, const ModelParams& params) {
  const double inverse_width = 1.0 / p.min_segment_width();
  const double per_well = std::ceil(inverse_width - 1e-9);
  const double mu_factor = std::max(1.0, std::ceil(params.mu() / 100.0));
  double cells = std::max(2000.0, 30.0 * per_well * mu_factor);
  // Narrowest segment of width 1/W with integer W (every middle-thirds
  // construction): make n + 1 a multiple of W so all breakpoints sit on
  // nodes and congruent wells are discretized identically.
  if (std::abs(inverse_width - std::round(inverse_width)) < 1e-9 * inverse_width) {
    cells = std::ceil(cells / per_well) * per_well;
  }
  return Grid(static_cast<std::size_t>(cells) - 1);
}

TridiagonalHamiltonian::TridiagonalHamiltonian(Grid grid, ModelParams params,
                                               std::vector<double> potential_samples)
    : grid_(grid), params_(params), c_(0.0), samples_(std::move(potential_samples)) {
  if (samples_.size() != grid_.size()) {
    throw ValidationError("one potential sample per grid node required");
  }
  const double inv_h = static_cast<double>(grid_.size() + 1);
  c_ = (inv_h * inv_h) / (params_.mu() * params_.mu());
}

std::pair<double, double> TridiagonalHamiltonian::gershgorin_bounds() const noexcept {
  const auto [lo, hi] = std::minmax_element(samples_.begin(), samples_.end());
  return {*lo, *hi + 4.0 * c_};
}

double TridiagonalHamiltonian::norm_inf() const noexcept {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(2.0 * c_ + v));
  return m + 2.0 * c_;
}

void TridiagonalHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? x[i - 1] : 0.0;
    const double right = i + 1 < n ? x[i + 1] : 0.0;
    y[i] = c_ * ((x[i] - left) + (x[i] - right)) + samples_[i] * x[i];
  }
}

double cell_average(const PiecewisePotential& p, double a, double b) {
  if (!(a >= 0.0 && b <= 1.0 && a < b)) throw DomainError("averaging cell must lie inside [0, 1]");
  std::size_t j = p.segment_index(a);
  if (b <= p.segment_end(j)) return p.values()[j];
  double weighted = 0.0;
  double total = 0.0;
  for (; j < p.segment_count() && p.segment_start(j) < b; ++j) {
    const double len = std::min(b, p.segment_end(j)) - std::max(a, p.segment_start(j));
    weighted += p.values()[j] * len;
    total += len;
  }
  return weighted / total;
}

TridiagonalHamiltonian assemble_hamiltonian(const PiecewisePotential& p, const ModelParams& params,
                                            const Grid& grid, Sampling sampling) {
  std::vector<double> samples(grid.size());
  const double half = 0.5 * grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    samples[i] = sampling == Sampling::point ? sample_potential(p, x)
                                             : cell_average(p, x - half, std::min(1.0, x + half));
  }
  return TridiagonalHamiltonian(grid, params, std::move(samples));
}

std::size_t sturm_count(const TridiagonalHamiltonian& h, double eps) {
  // Pivots q_i = (d_i - eps) - e^2 / q_{i-1} written as q_i = c (1 + s_i):
  //   s_i = (v_i - eps) / c + s_{i-1} / (1 + s_{i-1}),   s_1 = 1 + (v_1 - eps) / c.
  // Algebraically identical, but never forms 2c + v - eps, so the count stays
  // exact to ~ulp(|v - eps|) instead of ~ulp(4c).
  constexpr double tiny_pivot = 1e-300;
  const double inv_c = 1.0 / h.kinetic_scale();
  const auto v = h.potential_samples();
  std::size_t negatives = 0;
  double carry = 1.0;  // s_{i-1} / (1 + s_{i-1}); the empty prefix contributes 1
  for (double vi : v) {
    const double s = (vi - eps) * inv_c + carry;
    double pivot = 1.0 + s;
    if (pivot == 0.0) pivot = -tiny_pivot;
    if (pivot < 0.0) ++negatives;
    carry = s / pivot;
  }
  return negatives;
}

namespace {

void check_window(double lo, double hi, double tol) {
  if (!(lo < hi)) throw DomainError("energy window requires lo < hi");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
}

template <bool Parallel>
Spectrum eigenvalues_impl(const TridiagonalHamiltonian& h, double lo, double hi, double tol) {
  check_window(lo, hi, tol);
  const auto count = [&h](double e) { return sturm_count(h, e); };
  const std::size_t below = count(detail::next_up(lo));
  const std::size_t through = count(detail::next_up(hi));
  Spectrum s{std::vector<double>(through > below ? through - below : 0), lo, hi, tol, Engine::fd};
  const auto m = static_cast<std::ptrdiff_t>(s.eigenvalues.size());
  const auto body = [&](std::ptrdiff_t j) {
    s.eigenvalues[j] = detail::bisect_eigenvalue(count, below + j + 1, lo, hi, tol);
  };
  if constexpr (Parallel) {
    parallel_for(m, body);
  } else {
    serial_for(m, body);
  }
  return s;
}

// LU with partial pivoting of the shifted tridiagonal H - sigma I (the
// dgttrf/dgttrs scheme): unit-lower L with multipliers `lower`, upper U with
// diagonal `diag` and two superdiagonals.
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(const TridiagonalHamiltonian& h, double sigma) {
    const std::size_t n = h.size();
    const double e = h.offdiag();
    diag_.resize(n);
    lower_.assign(n > 0 ? n - 1 : 0, e);
    upper1_.assign(n > 0 ? n - 1 : 0, e);
    upper2_.assign(n > 1 ? n - 2 : 0, 0.0);
    swapped_.assign(n > 0 ? n - 1 : 0, false);
    const double c = h.kinetic_scale();
    const auto v = h.potential_samples();
    for (std::size_t i = 0; i < n; ++i) diag_[i] = 2.0 * c + (v[i] - sigma);

    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(diag_[i]) >= std::abs(lower_[i])) {
        if (diag_[i] != 0.0) {
          const double fact = lower_[i] / diag_[i];
          lower_[i] = fact;
          diag_[i + 1] -= fact * upper1_[i];
        } else {
          lower_[i] = 0.0;
        }
      } else {
        const double fact = diag_[i] / lower_[i];
        diag_[i] = lower_[i];
        lower_[i] = fact;
        const double temp = upper1_[i];
        upper1_[i] = diag_[i + 1];
        diag_[i + 1] = temp - fact * diag_[i + 1];
        if (i + 2 < n) {
          upper2_[i] = upper1_[i + 1];
          upper1_[i + 1] = -fact * upper1_[i + 1];
        }
        swapped_[i] = true;
      }
    }
  }

  bool singular() const {
    return std::any_of(diag_.begin(), diag_.end(), [](double d) { return d == 0.0; });
  }

  void replace_zero_pivots(double tiny) {
    for (double& d : diag_) {
      if (d == 0.0) d = tiny;
    }
  }

  void solve(std::span<double> b) const {
    const std::size_t n = diag_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped_[i]) {
        b[i + 1] -= lower_[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - lower_[i] * b[i];
      }
    }
    b[n - 1] /= diag_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - upper1_[n - 2] * b[n - 1]) / diag_[n - 2];
    for (std::size_t i = n >= 3 ? n - 2 : 0; i-- > 0;) {
      b[i] = (b[i] - upper1_[i] * b[i + 1] - upper2_[i] * b[i + 2]) / diag_[i];
    }
  }

 private:
  std::vector<double> diag_;
  std::vector<double> lower_;
  std::vector<double> upper1_;
  std::vector<double> upper2_;
  std::vector<bool> swapped_;
};

double norm2(std::span<const double> x) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double sum = 0.0;
  for (double v : x) sum += (v / scale) * (v / scale);
  return scale * std::sqrt(sum);
}

// x^T H x for unit x, as c * sum of squared differences plus sum v x^2.
double rayleigh_quotient(const TridiagonalHamiltonian& h, std::span<const double> x) {
  const auto v = h.potential_samples();
  const std::size_t n = x.size();
  double kinetic = x[0] * x[0] + x[n - 1] * x[n - 1];
  double potential = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = x[i + 1] - x[i];
    kinetic += d * d;
  }
  for (std::size_t i = 0; i < n; ++i) potential += v[i] * x[i] * x[i];
  return h.kinetic_scale() * kinetic + potential;
}

double shifted_residual(const TridiagonalHamiltonian& h, std::span<const double> x, double eps) {
  const auto v = h.potential_samples();
  const double c = h.kinetic_scale();
  const std::size_t n = x.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? x[i - 1] : 0.0;
    const double right = i + 1 < n ? x[i + 1] : 0.0;
    r[i] = c * ((x[i] - left) + (x[i] - right)) + (v[i] - eps) * x[i];
  }
  return norm2(r) / norm2(x);
}

void start_vector(std::span<double> x) {
  std::mt19937_64 rng(0x5eed5eedULL);
  for (double& xi : x) xi = 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Removes the components along each (normalized) reference state.
void orthogonalize(std::span<double> x, std::span<const Wavefunction> against) {
  for (const auto& ref : against) {
    if (ref.values.size() != x.size()) {
      throw DomainError("orthogonalization reference has a different grid");
    }
    const double unit = norm2(ref.values);
    if (unit == 0.0) continue;
    const double proj = std::inner_product(x.begin(), x.end(), ref.values.begin(), 0.0) / (unit * unit);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= proj * ref.values[i];
  }
}

}  // namespace

Spectrum eigenvalues_in_range(const TridiagonalHamiltonian& h, double lo, double hi, double tol) {
  return eigenvalues_impl<true>(h, lo, hi, tol);
}

Spectrum eigenvalues_by_index(const TridiagonalHamiltonian& h, std::size_t first, std::size_t last,
                              double tol) {
  if (first == 0 || first > last || last > h.size()) {
    throw DomainError("eigenvalue indices must satisfy 1 <= first <= last <= n");
  }
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const auto [glo, ghi] = h.gershgorin_bounds();
  const double lo = glo - 1.0;
  const auto count = [&h](double e) { return sturm_count(h, e); };
  Spectrum s{std::vector<double>(last - first + 1), lo, ghi, tol, Engine::fd};
  parallel_for(static_cast<std::ptrdiff_t>(s.size()), [&](std::ptrdiff_t j) {
    s.eigenvalues[j] = detail::bisect_eigenvalue(count, first + j, lo, ghi, tol);
  });
  return s;
}

double residual_threshold(const TridiagonalHamiltonian& h, double tol) {
  return std::max({1e-10, 10.0 * tol, 16.0 * DBL_EPSILON * h.norm_inf()});
}

double residual_norm(const TridiagonalHamiltonian& h, const Wavefunction& psi) {
  if (psi.values.size() != h.size()) throw DomainError("state and Hamiltonian grids differ");
  return shifted_residual(h, psi.values, psi.energy);
}

Wavefunction eigenvector(const TridiagonalHamiltonian& h, double eps, double tol,
                         std::span<const Wavefunction> orthogonal_to) {
  if (!std::isfinite(eps)) throw DomainError("shift must be finite");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  constexpr int max_iterations = 50;
  const std::size_t n = h.size();
  const double threshold = residual_threshold(h, tol);

  ShiftedTridiagonalLU lu(h, eps);
  if (lu.singular()) {
    lu = ShiftedTridiagonalLU(h, eps + 10.0 * tol);
    lu.replace_zero_pivots(DBL_EPSILON * h.norm_inf());
  }

  std::vector<double> x(n);
  start_vector(x);
  orthogonalize(x, orthogonal_to);
  double residual = 0.0;
  double rho = eps;
  for (int it = 0; it < max_iterations; ++it) {
    const double scale = norm2(x);
    for (double& xi : x) xi /= scale;
    lu.solve(x);
    orthogonalize(x, orthogonal_to);
    const double size = norm2(x);
    if (!(size > 0.0) || !std::isfinite(size)) {
      throw ConvergenceError("inverse iteration broke down", residual);
    }
    for (double& xi : x) xi /= size;
    rho = rayleigh_quotient(h, x);
    residual = shifted_residual(h, x, rho);
    if (residual <= threshold) {
      Wavefunction psi{std::move(x), rho, h.grid().spacing()};
      normalize_and_fix_sign(psi);
      return psi;
    }
  }
  throw ConvergenceError("inverse iteration did not converge in 50 iterations (residual " +
                             format_real(residual) + ")",
                         residual);
}

double orthogonalization_gap(const TridiagonalHamiltonian& h) { return 1e-5 * h.norm_inf(); }

namespace {

// [first, last) index ranges of eigenvalues linked by gaps <= gap.
std::vector<std::pair<std::size_t, std::size_t>> gap_clusters(const std::vector<double>& ev, double gap) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t k = 1; k <= ev.size(); ++k) {
    if (k == ev.size() || ev[k] - ev[k - 1] > gap) {
      out.emplace_back(start, k);
      start = k;
    }
  }
  return out;
}

void solve_cluster(const TridiagonalHamiltonian& h, const Spectrum& s, std::size_t first,
                   std::size_t last, std::vector<Wavefunction>& out) {
  for (std::size_t k = first; k < last; ++k) {
    out[k] = eigenvector(h, s.eigenvalues[k], s.tolerance,
                         std::span<const Wavefunction>(out.data() + first, k - first));
  }
}

template <bool Parallel>
std::vector<Wavefunction> eigenvectors_impl(const TridiagonalHamiltonian& h, const Spectrum& s) {
  std::vector<Wavefunction> out(s.size());
  if (s.empty()) return out;
  const auto clusters = gap_clusters(s.eigenvalues, orthogonalization_gap(h));
  const auto m = static_cast<std::ptrdiff_t>(clusters.size());
  const auto body = [&](std::ptrdiff_t j) {
    solve_cluster(h, s, clusters[j].first, clusters[j].second, out);
  };
  if constexpr (Parallel) {
    parallel_for(m, body);
  } else {
    serial_for(m, body);
  }
  return out;
}

}  // namespace

std::vector<Wavefunction> eigenvectors(const TridiagonalHamiltonian& h, const Spectrum& s) {
  return eigenvectors_impl<true>(h, s);
}

namespace serial {

Spectrum eigenvalues_in_range(const TridiagonalHamiltonian& h, double lo, double hi, double tol) {
  return eigenvalues_impl<false>(h, lo, hi, tol);
}

std::vector<Wavefunction> eigenvectors(const TridiagonalHamiltonian& h, const Spectrum& s) {
  return eigenvectors_impl<false>(h, s);
}

}  // namespace serial

}  // namespace cantor
