#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace morphgrad {

enum class BenchmarkKind { kSphere, kRastrigin };

std::string to_string(BenchmarkKind kind);
BenchmarkKind parse_benchmark_kind(const std::string& name);

// Analytic fitness (to be maximized) for optimizer verification.
struct BenchmarkEnv {
  BenchmarkKind kind = BenchmarkKind::kSphere;
  std::size_t dim = 1;

  friend bool operator==(const BenchmarkEnv&, const BenchmarkEnv&) = default;
};

// sphere:    -sum w_j^2
// rastrigin: -(10 dim + sum (w_j^2 - 10 cos(2 pi w_j)))
double benchmark_fitness(const BenchmarkEnv& env, std::span<const double> w);

}  // namespace morphgrad
