#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "acplab/brain.hpp"
#include "acplab/genome.hpp"
#include "acplab/rng.hpp"
#include "acplab/world.hpp"

namespace acplab::evo {

enum class Substrate { kMarkov, kLstm, kRnn };

std::string to_string(Substrate s);
Substrate substrate_from_string(const std::string& name);

std::unique_ptr<Brain> make_brain(Substrate s, const genome::Genome& g);

struct Individual {
  std::int64_t id = 0;
  std::int64_t parent_id = -1;  // -1 marks a founder
  genome::Genome genome;
  int n_correct = 0;
  double fitness = 0.0;
};

struct IndividualMeta {
  std::int64_t id = 0;
  std::int64_t parent_id = -1;
  int n_correct = 0;
  double fitness = 0.0;
};

inline IndividualMeta meta_of(const Individual& ind) {
  return IndividualMeta{ind.id, ind.parent_id, ind.n_correct, ind.fitness};
}

// 1.05 per correct trial, 1/1.05 per mistake, starting from 1.
double fitness_from_correct(int n_correct);

struct EvolutionConfig {
  Substrate substrate = Substrate::kMarkov;
  int population_size = 100;
  int generations = 2000;
  std::uint64_t seed = 0;
  genome::MutationConfig mutation;
  int initial_length = 5000;
  // Start codons written into each founder genome at random positions;
  // only meaningful for the Markov substrate, ignored by the ANNs.
  int start_codons = 0;
  world::WorldConfig world;
  unsigned threads = 1;

  void validate() const;
};

// Noise-free evaluation over all 64 trial specs; consumes no randomness.
struct EvalResult {
  int n_correct = 0;
  double fitness = 0.0;
};
EvalResult evaluate_fitness(Brain& brain, const world::WorldConfig& cfg);

std::vector<Individual> initial_population(const EvolutionConfig& cfg,
                                           Rng& rng, std::int64_t& next_id);

// Fills n_correct and fitness for every individual.
void evaluate_population(std::vector<Individual>& pop,
                         const EvolutionConfig& cfg);

// Fitness-proportional selection with replacement, asexual reproduction,
// no elitism.  Parents must already be evaluated (fitness > 0 always
// holds for the exponential fitness).
std::vector<Individual> next_generation(const std::vector<Individual>& pop,
                                        const EvolutionConfig& cfg, Rng& rng,
                                        std::int64_t& next_id);

struct AncestryArchive {
  // generations[g] lists generation g in id order.
  std::vector<std::vector<IndividualMeta>> generations;
  // Genome bytes keyed by id; after thin_to_lod only LOD ids remain.
  std::unordered_map<std::int64_t, genome::Genome> genomes;
};

// Checks that every parent_id in generation g+1 names an id in
// generation g; throws on corruption.
void validate_links(const AncestryArchive& archive);

// Path from a founder to the best final individual (highest fitness,
// lowest id on ties), in forward order.  Length = generation count.
std::vector<IndividualMeta> reconstruct_lod(const AncestryArchive& archive);

void thin_to_lod(AncestryArchive& archive);

// Generational driver.  Construction evaluates generation 0; advance()
// appends one generation.  All randomness comes from streams forked off
// the config seed per generation, so a resumed run replays identically.
class Evolver {
 public:
  explicit Evolver(const EvolutionConfig& cfg);

  // Resume from a checkpoint: history must cover generations 0..g and the
  // population must be generation g, already evaluated.
  Evolver(const EvolutionConfig& cfg,
          std::vector<std::vector<IndividualMeta>> history,
          std::vector<Individual> population,
          std::unordered_map<std::int64_t, genome::Genome> store,
          std::int64_t next_id);

  int generation() const { return static_cast<int>(history_.size()) - 1; }
  const std::vector<Individual>& population() const { return population_; }
  const std::vector<std::vector<IndividualMeta>>& history() const {
    return history_;
  }
  const std::unordered_map<std::int64_t, genome::Genome>& genome_store()
      const {
    return store_;
  }
  std::int64_t next_id() const { return next_id_; }

  void advance();

  // Drops stored genomes that are no longer ancestors of the current
  // population; the eventual line of descent always survives.
  void prune_store();

  // Moves the accumulated history and genome store out.
  AncestryArchive finish();

 private:
  void remember(const std::vector<Individual>& pop);

  EvolutionConfig cfg_;
  Rng master_;
  std::vector<std::vector<IndividualMeta>> history_;
  std::vector<Individual> population_;
  std::unordered_map<std::int64_t, genome::Genome> store_;
  std::unordered_map<std::int64_t, std::int64_t> parent_of_;
  std::int64_t next_id_ = 0;
};

// Convenience wrapper: fresh run, archive thinned to the LOD.
AncestryArchive run_evolution(const EvolutionConfig& cfg);

}  // namespace acplab::evo
