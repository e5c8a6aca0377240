#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "causal/plasticity.hpp"
#include "causal/random.hpp"
#include "causal/record.hpp"

namespace causal {

struct Genome {
  double d_H_bar = 0.056;
  double neg_w_min = 0.017;
  double w_max = 0.48;
  double d_s = 0.23;

  static constexpr std::size_t kGenes = 4;
  double& gene(std::size_t i);
  double gene(std::size_t i) const;

  PlasticityConfig to_config(Step t_p = 100) const;
  friend bool operator==(const Genome&, const Genome&) = default;
};

struct GeneRange {
  double lo;
  double hi;
};

// Search box for (d_H_bar, -w_min, w_max, d_s).
struct GeneRanges {
  std::array<GeneRange, Genome::kGenes> ranges{{{0.03, 1.0}, {0.003, 1.0}, {0.03, 1.0}, {0.003, 3.0}}};
  bool contains(const Genome& g) const;
  void validate() const;
};

struct GaConfig {
  std::size_t population_size = 300;
  double elitism_fraction = 0.1;
  double mutation_prob = 0.5;           // per chromosome
  std::size_t stagnation_generations = 3;
  std::size_t max_generations = 1000;   // hard cap on evolved generations
  std::size_t tournament_size = 3;
  Step eval_window = 600 * 1000;        // R is scored on the record's last steps
  Step t_p = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;                 // 0 = hardware concurrency
  GeneRanges ranges;

  void validate() const;
};

Genome sample_genome(Rng& rng, const GeneRanges& ranges);

// Fresh detector from the genome, full replay with plasticity on, R over the
// last `eval_window` steps. Throws ConfigError when the record is shorter
// than the window.
double evaluate(const Genome& genome, const EpisodeRecord& record, Step eval_window, Step t_p = 100);

// Elites (top ceil(elitism * N) by fitness) are kept unchanged in their
// original order; the rest are tournament-selected, uniformly crossed over and
// mutated with probability `mutation_prob` (one gene resampled log-uniformly).
// Child i of generation g draws from a stream seeded by (seed, g, i).
std::vector<Genome> evolve(const std::vector<Genome>& population,
                           const std::vector<double>& fitnesses, std::uint64_t generation,
                           const GaConfig& cfg);

struct GenerationStats {
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;
  Genome best_genome;
};

struct GaResult {
  Genome best;
  double best_fitness = 0.0;
  std::vector<GenerationStats> history;  // history[g].best is the best-ever fitness
};

// Evolves until the best fitness fails to improve for stagnation_generations
// successive generations (or max_generations is reached).
GaResult run_ga(const GaConfig& cfg, const EpisodeRecord& record);

// Fitness of every genome, evaluated in parallel; results depend only on
// (genome, record), never on scheduling.
std::vector<double> evaluate_population(const std::vector<Genome>& population,
                                        const EpisodeRecord& record, const GaConfig& cfg);

void write_history_csv(std::ostream& out, const std::vector<GenerationStats>& history);

}  // namespace causal
