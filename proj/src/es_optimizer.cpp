#include "morphgrad/es_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "morphgrad/errors.hpp"
#include "morphgrad/seeding.hpp"

namespace morphgrad {

SearchDistribution::SearchDistribution(std::vector<double> mean, std::vector<double> stddev)
    : mu(std::move(mean)), sigma(std::move(stddev)) {
  require(mu.size() == sigma.size(), "mu and sigma lengths differ");
}

SearchDistribution SearchDistribution::isotropic(std::vector<double> mean, double sigma0) {
  std::vector<double> s(mean.size(), sigma0);
  return SearchDistribution(std::move(mean), std::move(s));
}

double SearchDistribution::mean_sigma() const {
  if (sigma.empty()) return 0.0;
  return std::accumulate(sigma.begin(), sigma.end(), 0.0) / static_cast<double>(sigma.size());
}

bool SearchDistribution::finite() const {
  auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(mu.begin(), mu.end(), ok) && std::all_of(sigma.begin(), sigma.end(), ok);
}

void OptimizerConfig::validate() const {
  require(population_size >= 2, "optimizer.population_size must be >= 2");
  require(lr_mu > 0.0, "optimizer.lr_mu must be > 0");
  require(lr_sigma > 0.0, "optimizer.lr_sigma must be > 0");
  require(sigma_floor > 0.0, "optimizer.sigma_floor must be > 0");
  require(sigma_init >= sigma_floor, "optimizer.sigma_init must be >= sigma_floor");
  require(!antithetic || population_size % 2 == 0,
          "optimizer.population_size must be even when antithetic sampling is on");
}

Population sample_population(const SearchDistribution& dist, std::size_t n,
                             std::uint64_t rng_seed, bool antithetic) {
  require(n >= 2, "population size must be >= 2");
  require(!antithetic || n % 2 == 0, "antithetic sampling needs an even population");
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = dist.dim();

  Population pop;
  pop.candidates.resize(n, std::vector<double>(d));
  pop.seeds.resize(n);
  for (std::size_t i = 0; i < n; ++i) pop.seeds[i] = derive_seed({rng_seed, i});

  if (antithetic) {
    for (std::size_t i = 0; i < n; i += 2) {
      for (std::size_t j = 0; j < d; ++j) {
        const double eps = dist.sigma[j] * normal(rng);
        pop.candidates[i][j] = dist.mu[j] + eps;
        pop.candidates[i + 1][j] = dist.mu[j] - eps;
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j)
        pop.candidates[i][j] = dist.mu[j] + dist.sigma[j] * normal(rng);
  }
  return pop;
}

Gradient log_prob_grads(const SearchDistribution& dist, std::span<const double> candidate) {
  require(candidate.size() == dist.dim(), "candidate length != distribution dim");
  Gradient g{std::vector<double>(dist.dim()), std::vector<double>(dist.dim())};
  for (std::size_t j = 0; j < dist.dim(); ++j) {
    const double diff = candidate[j] - dist.mu[j];
    const double s = dist.sigma[j];
    g.mu[j] = diff / (s * s);
    g.sigma[j] = (diff * diff - s * s) / (s * s * s);
  }
  return g;
}

std::vector<double> centered_ranks(std::span<const double> fitnesses) {
  const std::size_t n = fitnesses.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitnesses[a] < fitnesses[b]; });
  std::vector<double> ranks(n, 0.0);
  if (n < 2) return ranks;
  const double top = static_cast<double>(n - 1);
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && fitnesses[order[hi + 1]] == fitnesses[order[lo]]) ++hi;
    const double mean_rank = 0.5 * static_cast<double>(lo + hi);
    for (std::size_t k = lo; k <= hi; ++k) ranks[order[k]] = mean_rank / top - 0.5;
    lo = hi + 1;
  }
  return ranks;
}

std::vector<double> shape_fitnesses(std::span<const double> fitnesses, const OptimizerConfig& cfg) {
  if (cfg.rank_shaping) return centered_ranks(fitnesses);
  std::vector<double> shaped(fitnesses.begin(), fitnesses.end());
  if (cfg.use_baseline && !shaped.empty()) {
    const double mean =
        std::accumulate(shaped.begin(), shaped.end(), 0.0) / static_cast<double>(shaped.size());
    for (double& v : shaped) v -= mean;
  }
  return shaped;
}

Gradient estimate_gradient(const SearchDistribution& dist, const Population& pop,
                           const OptimizerConfig& cfg) {
  require(pop.fitnesses.size() == pop.size() && pop.size() >= 1,
          "population has not been evaluated");
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!std::isfinite(pop.fitnesses[i]))
      throw EvaluationError("non-finite fitness for candidate " + std::to_string(i));
  }
  const std::vector<double> shaped = shape_fitnesses(pop.fitnesses, cfg);
  const std::size_t d = dist.dim();
  Gradient g{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& w = pop.candidates[i];
    require(w.size() == d, "candidate length != distribution dim");
    const double r = shaped[i];
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = w[j] - dist.mu[j];
      const double s = dist.sigma[j];
      g.mu[j] += r * (diff / (s * s));
      g.sigma[j] += r * ((diff * diff - s * s) / (s * s * s));
    }
  }
  const double inv_n = 1.0 / static_cast<double>(pop.size());
  for (std::size_t j = 0; j < d; ++j) {
    g.mu[j] *= inv_n;
    g.sigma[j] *= inv_n;
  }
  return g;
}

SearchDistribution update(const SearchDistribution& dist, const Gradient& grad,
                          const OptimizerConfig& cfg) {
  const std::size_t d = dist.dim();
  require(grad.mu.size() == d && grad.sigma.size() == d, "gradient length != distribution dim");
  SearchDistribution next = dist;
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(grad.mu[j]) || !std::isfinite(grad.sigma[j]))
      throw EvaluationError("non-finite gradient at coordinate " + std::to_string(j));
    next.mu[j] = dist.mu[j] + cfg.lr_mu * grad.mu[j];
    next.sigma[j] = std::max(cfg.sigma_floor, dist.sigma[j] + cfg.lr_sigma * grad.sigma[j]);
  }
  if (!next.finite()) throw EvaluationError("update produced a non-finite distribution");
  return next;
}

}  // namespace morphgrad
