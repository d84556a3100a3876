#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <vector>

#include "cantor/fd_solver.hpp"
#include "cantor/potential.hpp"

namespace cantor::testing {

// Full dense diagonalization of the tridiagonal operator, ascending.
inline std::vector<double> dense_eigenvalues(const TridiagonalHamiltonian& h) {
  const auto n = static_cast<Eigen::Index>(h.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = h.diag(static_cast<std::size_t>(i));
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = h.offdiag();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// Random piecewise potential: 2..12 segments, values uniform in [-1, 1].
inline PiecewisePotential random_potential(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> segments(2, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  const int count = segments(rng);
  std::vector<double> cuts;
  while (static_cast<int>(cuts.size()) < count - 1) {
    const double c = unit(rng);
    if (c > 1e-3 && c < 1.0 - 1e-3) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> breaks{0.0};
  for (double c : cuts) {
    if (c - breaks.back() > 1e-3) breaks.push_back(c);
  }
  breaks.push_back(1.0);
  std::vector<double> values;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) values.push_back(value(rng));
  return PiecewisePotential(breaks, values);
}

}  // namespace cantor::testing
