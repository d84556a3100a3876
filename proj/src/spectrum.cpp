#include "cantor/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "cantor/error.hpp"

namespace cantor {

ModelParams::ModelParams(double mu) : mu_(mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw ValidationError("mu must be positive and finite");
  }
}

std::string_view to_string(Engine engine) noexcept {
  return engine == Engine::fd ? "fd" : "tm";
}

double Wavefunction::norm_squared() const noexcept {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return spacing * sum;
}

void normalize_and_fix_sign(Wavefunction& psi) {
  const double norm2 = psi.norm_squared();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw DomainError("cannot normalize a zero or non-finite state");
  }
  double peak = 0.0;
  for (double v : psi.values) peak = std::max(peak, std::abs(v));
  double scale = 1.0 / std::sqrt(norm2);
  const auto lead = std::find_if(psi.values.begin(), psi.values.end(),
                                 [&](double v) { return std::abs(v) >= 1e-8 * peak; });
  if (lead != psi.values.end() && *lead < 0.0) scale = -scale;
  for (double& v : psi.values) v *= scale;
}

std::vector<double> probability_density(const Wavefunction& psi) {
  std::vector<double> density(psi.values.size());
  std::transform(psi.values.begin(), psi.values.end(), density.begin(),
                 [](double v) { return v * v; });
  return density;
}

}  // namespace cantor
