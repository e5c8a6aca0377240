#include "causal/ga.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

#include "causal/errors.hpp"
#include "causal/experiment.hpp"
#include "causal/kv_config.hpp"
#include "causal/metrics.hpp"
#include "causal/neuron.hpp"

namespace causal {

double& Genome::gene(std::size_t i) {
  switch (i) {
    case 0: return d_H_bar;
    case 1: return neg_w_min;
    case 2: return w_max;
    case 3: return d_s;
  }
  throw std::out_of_range("gene index");
}

double Genome::gene(std::size_t i) const { return const_cast<Genome&>(*this).gene(i); }

PlasticityConfig Genome::to_config(Step t_p) const {
  PlasticityConfig cfg;
  cfg.d_bar = d_H_bar;
  cfg.w_min = -neg_w_min;
  cfg.w_max = w_max;
  cfg.d_s = d_s;
  cfg.t_p = t_p;
  return cfg;
}

bool GeneRanges::contains(const Genome& g) const {
  for (std::size_t i = 0; i < Genome::kGenes; ++i) {
    if (!(g.gene(i) >= ranges[i].lo && g.gene(i) <= ranges[i].hi)) return false;
  }
  return true;
}

void GeneRanges::validate() const {
  for (const auto& r : ranges) {
    if (!(r.lo > 0.0 && r.lo < r.hi && std::isfinite(r.hi))) {
      throw ConfigError("gene ranges must satisfy 0 < lo < hi");
    }
  }
}

void GaConfig::validate() const {
  if (population_size < 2) throw ConfigError("population_size must be at least 2");
  if (!(elitism_fraction > 0.0 && elitism_fraction < 1.0)) {
    throw ConfigError("elitism_fraction must be in (0, 1)");
  }
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
    throw ConfigError("mutation_prob must be in [0, 1]");
  }
  if (stagnation_generations < 1) throw ConfigError("stagnation_generations must be >= 1");
  if (tournament_size < 1) throw ConfigError("tournament_size must be >= 1");
  if (eval_window < 1) throw ConfigError("eval_window must be positive");
  if (t_p < 1) throw ConfigError("T_P must be positive");
  ranges.validate();
}

Genome sample_genome(Rng& rng, const GeneRanges& ranges) {
  Genome g;
  for (std::size_t i = 0; i < Genome::kGenes; ++i) {
    g.gene(i) = std::clamp(log_uniform(rng, ranges.ranges[i].lo, ranges.ranges[i].hi),
                           ranges.ranges[i].lo, ranges.ranges[i].hi);
  }
  return g;
}

double evaluate(const Genome& genome, const EpisodeRecord& record, Step eval_window, Step t_p) {
  if (record.duration() < eval_window) {
    throw ConfigError("record is shorter than the evaluation window");
  }
  Detector detector(record.channels(), genome.to_config(t_p));
  const auto rewards = record.reward_steps();
  std::vector<Step> fires;
  auto reward = rewards.begin();
  for (Step t = 0; t < record.duration(); ++t) {
    const bool dopamine = reward != rewards.end() && *reward == t;
    if (dopamine) ++reward;
    if (detector.tick(record.frame(t), dopamine)) fires.push_back(t);
  }
  return windowed_r(fires, rewards, t_p, record.duration() - eval_window, record.duration());
}

namespace {

std::vector<std::size_t> ranking(const std::vector<double>& fitnesses) {
  std::vector<std::size_t> order(fitnesses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });
  return order;
}

std::size_t tournament(Rng& rng, const std::vector<double>& fitnesses, std::size_t size) {
  std::size_t best = uniform_index(rng, fitnesses.size());
  for (std::size_t k = 1; k < size; ++k) {
    const std::size_t c = uniform_index(rng, fitnesses.size());
    if (fitnesses[c] > fitnesses[best] || (fitnesses[c] == fitnesses[best] && c < best)) best = c;
  }
  return best;
}

}  // namespace

std::vector<Genome> evolve(const std::vector<Genome>& population,
                           const std::vector<double>& fitnesses, std::uint64_t generation,
                           const GaConfig& cfg) {
  if (population.size() != fitnesses.size()) {
    throw ConfigError("population and fitness sizes differ");
  }
  if (population.empty()) return {};
  if (!(cfg.elitism_fraction >= 0.0 && cfg.elitism_fraction <= 1.0)) {
    throw ConfigError("elitism_fraction must be in [0, 1]");
  }
  const std::size_t n = population.size();
  const auto n_elite = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::ceil(cfg.elitism_fraction * static_cast<double>(n) - 1e-9)));

  const auto order = ranking(fitnesses);
  std::vector<std::size_t> elites(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_elite));
  std::sort(elites.begin(), elites.end());

  std::vector<Genome> next;
  next.reserve(n);
  for (const auto i : elites) next.push_back(population[i]);

  for (std::size_t child = next.size(); child < n; ++child) {
    Rng rng(derive_seed(cfg.seed, generation, child));
    const Genome& a = population[tournament(rng, fitnesses, cfg.tournament_size)];
    const Genome& b = population[tournament(rng, fitnesses, cfg.tournament_size)];
    Genome g;
    for (std::size_t i = 0; i < Genome::kGenes; ++i) {
      g.gene(i) = (rng() & 1) ? a.gene(i) : b.gene(i);
    }
    if (uniform01(rng) < cfg.mutation_prob) {
      const std::size_t i = uniform_index(rng, Genome::kGenes);
      const auto& r = cfg.ranges.ranges[i];
      g.gene(i) = std::clamp(log_uniform(rng, r.lo, r.hi), r.lo, r.hi);
    }
    next.push_back(g);
  }
  return next;
}

std::vector<double> evaluate_population(const std::vector<Genome>& population,
                                        const EpisodeRecord& record, const GaConfig& cfg) {
  std::vector<double> fitness(population.size());
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(population.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto work = [&] {
    for (std::size_t i; (i = next++) < population.size();) {
      if (failed) return;
      try {
        fitness[i] = evaluate(population[i], record, cfg.eval_window, cfg.t_p);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return fitness;
}

namespace {

GenerationStats summarize(std::size_t generation, const std::vector<Genome>& population,
                          const std::vector<double>& fitness) {
  GenerationStats s;
  s.generation = generation;
  const auto best = static_cast<std::size_t>(
      std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
  s.best = fitness[best];
  s.best_genome = population[best];
  s.mean = std::accumulate(fitness.begin(), fitness.end(), 0.0) / static_cast<double>(fitness.size());
  return s;
}

}  // namespace

GaResult run_ga(const GaConfig& cfg, const EpisodeRecord& record) {
  cfg.validate();
  if (record.duration() < cfg.eval_window) {
    throw ConfigError("record is shorter than the evaluation window");
  }
  std::vector<Genome> population;
  population.reserve(cfg.population_size);
  for (std::size_t i = 0; i < cfg.population_size; ++i) {
    Rng rng(derive_seed(cfg.seed, 0, i));
    population.push_back(sample_genome(rng, cfg.ranges));
  }
  auto fitness = evaluate_population(population, record, cfg);

  GaResult result;
  result.history.push_back(summarize(0, population, fitness));
  result.best = result.history.back().best_genome;
  result.best_fitness = result.history.back().best;

  std::size_t stagnant = 0;
  for (std::size_t gen = 1; gen <= cfg.max_generations && stagnant < cfg.stagnation_generations; ++gen) {
    auto next = evolve(population, fitness, gen, cfg);
    // Elites are carried over unchanged, so their fitness is reused.
    std::vector<double> next_fitness(next.size(), 0.0);
    std::vector<Genome> fresh;
    std::vector<std::size_t> fresh_index;
    for (std::size_t i = 0; i < next.size(); ++i) {
      const auto same = std::find(population.begin(), population.end(), next[i]);
      if (same != population.end()) {
        next_fitness[i] = fitness[static_cast<std::size_t>(same - population.begin())];
      } else {
        fresh.push_back(next[i]);
        fresh_index.push_back(i);
      }
    }
    const auto fresh_fitness = evaluate_population(fresh, record, cfg);
    for (std::size_t k = 0; k < fresh.size(); ++k) next_fitness[fresh_index[k]] = fresh_fitness[k];
    population = std::move(next);
    fitness = std::move(next_fitness);

    auto stats = summarize(gen, population, fitness);
    if (stats.best > result.best_fitness) {
      result.best_fitness = stats.best;
      result.best = stats.best_genome;
      stagnant = 0;
    } else {
      ++stagnant;
    }
    result.history.push_back(stats);
  }
  return result;
}

void write_history_csv(std::ostream& out, const std::vector<GenerationStats>& history) {
  out << "generation,best_R,mean_R,d_H_bar,w_min,w_max,d_s\n";
  for (const auto& s : history) {
    out << s.generation << ',' << format_double(s.best) << ',' << format_double(s.mean) << ','
        << format_double(s.best_genome.d_H_bar) << ',' << format_double(-s.best_genome.neg_w_min)
        << ',' << format_double(s.best_genome.w_max) << ',' << format_double(s.best_genome.d_s)
        << '\n';
  }
}

}  // namespace causal
