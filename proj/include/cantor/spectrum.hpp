#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cantor {

/// Dimensionless measure mu = sqrt(2 m lambda^2 V0) / hbar. Large mu is the
/// semiclassical limit.
class ModelParams {
 public:
  /// Throws ValidationError unless mu is positive and finite.
  explicit ModelParams(double mu);

  double mu() const noexcept { return mu_; }

 private:
  double mu_;
};

enum class Engine { fd, tm };

std::string_view to_string(Engine engine) noexcept;

/// Dimensionless eigenvalues eps = E / V0 found in the window (lo, hi].
///
/// Eigenvalues are nondecreasing. Values closer together than the floating
/// point resolution of the solver (mirror-symmetric wells behind wide
/// barriers split by far less than one ulp) come out equal; count
/// conservation still holds.
struct Spectrum {
  std::vector<double> eigenvalues;
  double lo = 0.0;
  double hi = 0.0;
  double tolerance = 0.0;
  Engine engine = Engine::fd;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  bool empty() const noexcept { return eigenvalues.empty(); }
  double operator[](std::size_t k) const { return eigenvalues[k]; }
};

/// Eigenfunction sampled on the uniform nodes x_i = (i + 1) h, i = 0..n-1,
/// with walls at x = 0 and x = (n + 1) h = 1. Normalized so that
/// h * sum(psi_i^2) = 1.
struct Wavefunction {
  std::vector<double> values;
  double energy = 0.0;
  double spacing = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  double node(std::size_t i) const noexcept { return static_cast<double>(i + 1) * spacing; }
  /// h * sum(psi_i^2).
  double norm_squared() const noexcept;
};

/// Scales psi so that h * sum(psi^2) = 1 and flips the sign so the first
/// component above 1e-8 of the peak magnitude is positive.
void normalize_and_fix_sign(Wavefunction& psi);

/// |psi_i|^2 on the nodes; sums to 1 under h * sum.
std::vector<double> probability_density(const Wavefunction& psi);

}  // namespace cantor
