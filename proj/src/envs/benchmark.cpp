#include "morphgrad/envs/benchmark.hpp"

#include <cmath>
#include <numbers>

#include "morphgrad/errors.hpp"

namespace morphgrad {

std::string to_string(BenchmarkKind kind) {
  return kind == BenchmarkKind::kSphere ? "sphere" : "rastrigin";
}

BenchmarkKind parse_benchmark_kind(const std::string& name) {
  if (name == "sphere") return BenchmarkKind::kSphere;
  if (name == "rastrigin") return BenchmarkKind::kRastrigin;
  throw ContractError("unknown benchmark '" + name + "'");
}

double benchmark_fitness(const BenchmarkEnv& env, std::span<const double> w) {
  require(w.size() == env.dim, "benchmark input length != dim");
  double sum = 0.0;
  switch (env.kind) {
    case BenchmarkKind::kSphere:
      for (double x : w) sum += x * x;
      return -sum;
    case BenchmarkKind::kRastrigin:
      for (double x : w) sum += x * x - 10.0 * std::cos(2.0 * std::numbers::pi * x);
      return -(10.0 * static_cast<double>(env.dim) + sum);
  }
  return 0.0;
}

}  // namespace morphgrad
