#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace morphgrad {

// Factored Gaussian over the joint parameter vector: w_j ~ N(mu_j, sigma_j^2).
struct SearchDistribution {
  std::vector<double> mu;
  std::vector<double> sigma;

  SearchDistribution() = default;
  SearchDistribution(std::vector<double> mean, std::vector<double> stddev);
  // mu as given, every sigma_j = sigma0.
  static SearchDistribution isotropic(std::vector<double> mean, double sigma0);

  std::size_t dim() const { return mu.size(); }
  double mean_sigma() const;
  bool finite() const;
};

struct OptimizerConfig {
  std::size_t population_size = 192;
  double lr_mu = 0.05;
  double lr_sigma = 0.01;
  double sigma_init = 0.1;
  double sigma_floor = 0.01;
  bool use_baseline = true;
  bool rank_shaping = false;
  // Mirrored sampling: candidates come in pairs mu +- eps.
  bool antithetic = false;

  void validate() const;

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

struct Population {
  std::vector<std::vector<double>> candidates;
  std::vector<double> fitnesses;
  std::vector<std::uint64_t> seeds;

  std::size_t size() const { return candidates.size(); }
};

struct Gradient {
  std::vector<double> mu;
  std::vector<double> sigma;
};

// Draws n candidates coordinate-wise from the distribution. Deterministic
// in (dist, n, rng_seed). `seeds[i]` is a per-candidate seed derived from
// rng_seed for callers that need one. Fitnesses are left empty.
Population sample_population(const SearchDistribution& dist, std::size_t n,
                             std::uint64_t rng_seed, bool antithetic = false);

// Closed-form score function of the factored Gaussian:
//   d/dmu_j    log N = (w_j - mu_j) / sigma_j^2
//   d/dsigma_j log N = ((w_j - mu_j)^2 - sigma_j^2) / sigma_j^3
Gradient log_prob_grads(const SearchDistribution& dist, std::span<const double> candidate);

// Fitness shaping applied before the gradient estimate.
std::vector<double> shape_fitnesses(std::span<const double> fitnesses,
                                    const OptimizerConfig& cfg);

// Centered ranks in [-0.5, 0.5]; tied fitnesses share their mean rank.
std::vector<double> centered_ranks(std::span<const double> fitnesses);

// Population Monte Carlo estimate of grad_theta E[R]:
//   (1/N) sum_i shaped(R_i) * grad log pi(w_i).
// Throws EvaluationError if any fitness is non-finite.
Gradient estimate_gradient(const SearchDistribution& dist, const Population& pop,
                           const OptimizerConfig& cfg);

// Gradient ascent step; sigma is clamped at cfg.sigma_floor.
// Throws EvaluationError on a non-finite gradient or result.
SearchDistribution update(const SearchDistribution& dist, const Gradient& grad,
                          const OptimizerConfig& cfg);

}  // namespace morphgrad
