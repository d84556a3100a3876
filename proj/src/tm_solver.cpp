#include "cantor/tm_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "bisection.hpp"
#include "cantor/error.hpp"
#include "cantor/parallel.hpp"

namespace cantor {

namespace {

// Branch switch to the Taylor series, in |k| * length (|z| = (k L)^2).
constexpr double kSeriesThreshold = 1e-6;
// Largest phase advance per substep; below pi, so a substep holds at most
// one zero and sign changes count them exactly.
constexpr double kMaxPhasePerStep = 1.5;

// cos(sqrt z), sin(sqrt z)/sqrt z for z >= 0 and their hyperbolic
// continuations for z < 0. With `scaled`, hyperbolic values with
// sqrt(-z) > 1 come back multiplied by exp(-sqrt(-z)).
struct CosSinc {
  double cos_part;
  double sinc_part;
};

CosSinc cos_sinc(double z, bool scaled) {
  if (std::abs(z) < kSeriesThreshold * kSeriesThreshold) {
    return {1.0 - z / 2.0 + z * z / 24.0, 1.0 - z / 6.0 + z * z / 120.0};
  }
  if (z > 0.0) {
    const double r = std::sqrt(z);
    return {std::cos(r), std::sin(r) / r};
  }
  const double r = std::sqrt(-z);
  if (scaled && r > 1.0) {
    const double e2 = std::exp(-2.0 * r);
    return {0.5 * (1.0 + e2), -std::expm1(-2.0 * r) / (2.0 * r)};
  }
  return {std::cosh(r), std::sinh(r) / r};
}

// One closed-form step of length `len` with q = mu^2 (eps - v).
void step(ShootingState& s, double q, double len, bool scaled) {
  const auto [c, sinc] = cos_sinc(q * len * len, scaled);
  const double psi = c * s.psi + len * sinc * s.dpsi;
  const double dpsi = -q * len * sinc * s.psi + c * s.dpsi;
  if ((s.psi > 0.0 && psi <= 0.0) || (s.psi < 0.0 && psi >= 0.0)) ++s.node_count;
  s.psi = psi;
  s.dpsi = dpsi;
}

ShootingState shoot(const PiecewisePotential& p, double mu, double eps, Renormalize renormalize) {
  const bool scaled = renormalize == Renormalize::yes;
  const auto values = p.values();
  const double mu2 = mu * mu;
  ShootingState s;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double q = mu2 * (eps - values[j]);
    const double len = p.segment_width(j);
    const double phase = q > 0.0 ? std::sqrt(q) * len : 0.0;
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(phase / kMaxPhasePerStep)));
    const double piece = len / static_cast<double>(pieces);
    for (std::size_t k = 0; k < pieces; ++k) step(s, q, piece, scaled);
    if (scaled) {
      const double m = std::max(std::abs(s.psi), std::abs(s.dpsi));
      s.psi /= m;
      s.dpsi /= m;
    }
  }
  // A zero exactly on the right wall is not interior.
  if (s.psi == 0.0 && s.node_count > 0) --s.node_count;
  return s;
}

// Root k (1-based) inside (lo, hi]: node-count bisection until the bracket
// holds exactly that root, then bisection on the sign of the mismatch.
double refine_root(const PiecewisePotential& p, double mu, std::size_t k, double lo, double hi,
                   double tol) {
  double a = lo;
  double b = detail::next_up(hi);
  ShootingState sa = shoot(p, mu, a, Renormalize::yes);
  ShootingState sb = shoot(p, mu, b, Renormalize::yes);
  while (b - a > tol) {
    const double m = detail::midpoint(a, b);
    if (m <= a || m >= b) break;
    const ShootingState sm = shoot(p, mu, m, Renormalize::yes);
    const bool isolated = sa.node_count + 1 == k && sb.node_count == k && sa.psi != 0.0 &&
                          sb.psi != 0.0 && std::signbit(sa.psi) != std::signbit(sb.psi);
    bool go_left = false;
    if (isolated) {
      go_left = sm.psi == 0.0 || std::signbit(sm.psi) != std::signbit(sa.psi);
    } else {
      go_left = sm.node_count >= k;
    }
    if (go_left) {
      b = m;
      sb = sm;
    } else {
      a = m;
      sa = sm;
    }
  }
  double result = detail::midpoint(a, b);
  if (result > hi) result = hi;
  if (result <= lo) result = detail::next_up(lo);
  return result;
}

template <bool Parallel>
Spectrum tm_eigenvalues_impl(const PiecewisePotential& p, const ModelParams& params, double lo,
                             double hi, double tol) {
  if (!(lo < hi)) throw DomainError("energy window requires lo < hi");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const double mu = params.mu();
  const std::size_t below = tm_node_count(p, params, detail::next_up(lo));
  const std::size_t through = tm_node_count(p, params, detail::next_up(hi));
  Spectrum s{std::vector<double>(through > below ? through - below : 0), lo, hi, tol, Engine::tm};
  const auto body = [&](std::ptrdiff_t j) {
    s.eigenvalues[j] = refine_root(p, mu, below + j + 1, lo, hi, tol);
  };
  const auto m = static_cast<std::ptrdiff_t>(s.eigenvalues.size());
  if constexpr (Parallel) {
    parallel_for(m, body);
  } else {
    serial_for(m, body);
  }
  return s;
}

// Per-segment basis for the coefficient system. Trig: C(q t^2) and
// scale * t * S(q t^2). Exp (barriers with kappa L > 1): exp(-kappa t) and
// exp(-kappa (L - t)), both bounded by 1 on the segment.
struct SegmentBasis {
  bool exponential = false;
  double q = 0.0;
  double len = 0.0;
  double scale = 1.0;  // typical |psi'| / |psi|

  SegmentBasis(double q_, double len_) : q(q_), len(len_) {
    const double kl = std::sqrt(std::abs(q)) * len;
    exponential = q < 0.0 && kl > 1.0;
    scale = std::max(1.0 / len, std::sqrt(std::abs(q)));
  }

  // Values and derivatives of both basis functions at local t in [0, len].
  std::array<double, 4> eval(double t) const {
    if (exponential) {
      const double kappa = std::sqrt(-q);
      const double left = std::exp(-kappa * t);
      const double right = std::exp(-kappa * (len - t));
      return {left, right, -kappa * left, kappa * right};
    }
    const auto [c, sinc] = cos_sinc(q * t * t, false);
    return {c, scale * t * sinc, -q * t * sinc, scale * c};
  }
};

}  // namespace

Mismatch tm_mismatch(const PiecewisePotential& p, const ModelParams& params, double eps,
                     Renormalize renormalize) {
  const ShootingState s = shoot(p, params.mu(), eps, renormalize);
  return {s.psi, s.node_count};
}

std::size_t tm_node_count(const PiecewisePotential& p, const ModelParams& params, double eps) {
  return shoot(p, params.mu(), eps, Renormalize::yes).node_count;
}

Spectrum tm_eigenvalues(const PiecewisePotential& p, const ModelParams& params, double lo, double hi,
                        double tol) {
  return tm_eigenvalues_impl<true>(p, params, lo, hi, tol);
}

namespace serial {

Spectrum tm_eigenvalues(const PiecewisePotential& p, const ModelParams& params, double lo, double hi,
                        double tol) {
  return tm_eigenvalues_impl<false>(p, params, lo, hi, tol);
}

}  // namespace serial

Wavefunction tm_eigenfunction(const PiecewisePotential& p, const ModelParams& params, double eps,
                              std::size_t sample_count) {
  if (sample_count == 0) throw DomainError("sample count must be positive");
  if (!std::isfinite(eps)) throw DomainError("eigenvalue must be finite");
  const double mu = params.mu();

  // Polish: the nearest root within the stale tolerance, to adjacent doubles.
  const double lo = eps - kStaleEigenvalueTolerance;
  const double hi = eps + kStaleEigenvalueTolerance;
  const std::size_t below = tm_node_count(p, params, detail::next_up(lo));
  const std::size_t through = tm_node_count(p, params, detail::next_up(hi));
  if (through <= below) {
    throw DomainError("stale eigenvalue: no root within " + format_real(kStaleEigenvalueTolerance) +
                      " of " + format_real(eps));
  }
  double energy = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = below + 1; k <= through; ++k) {
    const double root = refine_root(p, mu, k, lo, hi, 0.0);
    if (std::isnan(energy) || std::abs(root - eps) < std::abs(energy - eps)) energy = root;
  }

  const std::size_t m = p.segment_count();
  std::vector<SegmentBasis> basis;
  basis.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    basis.emplace_back(mu * mu * (energy - p.values()[j]), p.segment_width(j));
  }

  const auto dim = static_cast<Eigen::Index>(2 * m);
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(dim, dim);
  {
    const auto at0 = basis[0].eval(0.0);
    system(0, 0) = at0[0];
    system(0, 1) = at0[1];
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const auto end = basis[j].eval(basis[j].len);
      const auto start = basis[j + 1].eval(0.0);
      const auto row = static_cast<Eigen::Index>(1 + 2 * j);
      const auto col = static_cast<Eigen::Index>(2 * j);
      const double dscale = 1.0 / std::max(basis[j].scale, basis[j + 1].scale);
      system(row, col) = end[0];
      system(row, col + 1) = end[1];
      system(row, col + 2) = -start[0];
      system(row, col + 3) = -start[1];
      system(row + 1, col) = dscale * end[2];
      system(row + 1, col + 1) = dscale * end[3];
      system(row + 1, col + 2) = -dscale * start[2];
      system(row + 1, col + 3) = -dscale * start[3];
    }
    const auto at1 = basis[m - 1].eval(basis[m - 1].len);
    system(dim - 1, dim - 2) = at1[0];
    system(dim - 1, dim - 1) = at1[1];
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(system, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  if (!(sigma(dim - 1) <= kStaleEigenvalueTolerance * sigma(0))) {
    throw DomainError("stale eigenvalue: coefficient system is not singular at " + format_real(energy));
  }
  const Eigen::VectorXd coeff = svd.matrixV().col(dim - 1);

  Wavefunction psi;
  psi.energy = energy;
  psi.spacing = 1.0 / static_cast<double>(sample_count + 1);
  psi.values.resize(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i) {
    const double x = psi.node(i);
    const std::size_t j = p.segment_index(x);
    const auto b = basis[j].eval(x - p.segment_start(j));
    psi.values[i] = coeff(2 * j) * b[0] + coeff(2 * j + 1) * b[1];
  }
  normalize_and_fix_sign(psi);
  return psi;
}

}  // namespace cantor
