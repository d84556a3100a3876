// Serial reference vs OpenMP kernels on the mu = 300 workloads.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>

#include "cantor/analysis.hpp"
#include "cantor/parallel.hpp"
#include "cantor/tm_solver.hpp"

using namespace cantor;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s) {
  std::cout << name << "," << serial_s << "," << parallel_s << "," << serial_s / parallel_s << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const int order = argc > 1 ? std::atoi(argv[1]) : 4;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  CantorSpec spec;
  spec.order = order;
  const auto p = build_cantor_potential(spec);
  const ModelParams params(300);
  const auto h = assemble_hamiltonian(p, params, default_grid(p, params));
  std::cout << "# order " << order << ", n = " << h.size() << ", threads = " << worker_threads() << "\n";
  std::cout << "kernel,serial_s,parallel_s,speedup\n";

  const auto s = eigenvalues_in_range(h, -1.0, 0.0);
  report("eigenvalues_in_range", best_of(repeats, [&] { serial::eigenvalues_in_range(h, -1.0, 0.0); }),
         best_of(repeats, [&] { eigenvalues_in_range(h, -1.0, 0.0); }));
  report("eigenvectors", best_of(repeats, [&] { serial::eigenvectors(h, s); }),
         best_of(repeats, [&] { eigenvectors(h, s); }));
  const auto counter = fd_counter(h);
  report("staircase", best_of(repeats, [&] { serial::staircase(counter, -1.0, 0.0, 1000); }),
         best_of(repeats, [&] { staircase(counter, -1.0, 0.0, 1000); }));
  report("tm_eigenvalues", best_of(repeats, [&] { serial::tm_eigenvalues(p, params, -1.0, 0.0); }),
         best_of(repeats, [&] { tm_eigenvalues(p, params, -1.0, 0.0); }));
  const std::vector<double> mus{10, 20, 40, 80, 160, 300};
  SweepOptions options;
  options.grid_points = 1999;
  report("mu_sweep", best_of(repeats, [&] { serial::mu_sweep(p, mus, options); }),
         best_of(repeats, [&] { mu_sweep(p, mus, options); }));
  return 0;
}
