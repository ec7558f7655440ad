#include "acplab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "acplab/markov_brain.hpp"
#include "acplab/neuro.hpp"
#include "acplab/parallel.hpp"

namespace acplab::evo {

namespace {

// Between prunes the genome store grows by one population per
// generation; 20 keeps the high-water mark small without measurable cost.
constexpr int kPruneInterval = 20;

}  // namespace

std::string to_string(Substrate s) {
  switch (s) {
    case Substrate::kMarkov: return "markov";
    case Substrate::kLstm: return "lstm";
    case Substrate::kRnn: return "rnn";
  }
  throw std::logic_error("unknown substrate");
}

Substrate substrate_from_string(const std::string& name) {
  if (name == "markov") return Substrate::kMarkov;
  if (name == "lstm") return Substrate::kLstm;
  if (name == "rnn") return Substrate::kRnn;
  throw std::invalid_argument("unknown substrate '" + name +
                              "' (expected markov, lstm, or rnn)");
}

std::unique_ptr<Brain> make_brain(Substrate s, const genome::Genome& g) {
  switch (s) {
    case Substrate::kMarkov: return std::make_unique<markov::MarkovBrain>(g);
    case Substrate::kLstm: return std::make_unique<neuro::LstmBrain>(g);
    case Substrate::kRnn: return std::make_unique<neuro::RnnBrain>(g);
  }
  throw std::logic_error("unknown substrate");
}

double fitness_from_correct(int n_correct) {
  return std::pow(1.05, 2 * n_correct - 64);
}

void EvolutionConfig::validate() const {
  if (population_size < 2)
    throw std::invalid_argument("population_size must be at least 2");
  if (generations < 1)
    throw std::invalid_argument("generations must be at least 1");
  mutation.validate();
  if (initial_length < mutation.min_len || initial_length > mutation.max_len)
    throw std::invalid_argument("initial_length outside genome bounds");
  if (start_codons < 0)
    throw std::invalid_argument("start_codons must be non-negative");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  world.validate();
}

EvalResult evaluate_fitness(Brain& brain, const world::WorldConfig& cfg) {
  Rng unused(0);
  int n_correct = 0;
  for (const world::TrialSpec& spec : world::enumerate_specs(cfg))
    if (world::run_trial(brain, spec, cfg, 0.0, unused, false).success)
      ++n_correct;
  return EvalResult{n_correct, fitness_from_correct(n_correct)};
}

std::vector<Individual> initial_population(const EvolutionConfig& cfg,
                                           Rng& rng, std::int64_t& next_id) {
  std::vector<Individual> pop;
  pop.reserve(static_cast<std::size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) {
    Individual ind;
    ind.id = next_id++;
    ind.parent_id = -1;
    ind.genome = genome::random_genome(cfg.initial_length, cfg.mutation, rng);
    if (cfg.substrate == Substrate::kMarkov && cfg.start_codons > 0 &&
        ind.genome.size() >= 2) {
      // Placements may collide and overwrite each other; the count is a
      // ceiling, not a guarantee.
      for (int c = 0; c < cfg.start_codons; ++c) {
        auto pos = static_cast<std::size_t>(
            rng.next_below(ind.genome.size() - 1));
        ind.genome[pos] = markov::kCodonFirst;
        ind.genome[pos + 1] = markov::kCodonSecond;
      }
    }
    pop.push_back(std::move(ind));
  }
  return pop;
}

void evaluate_population(std::vector<Individual>& pop,
                         const EvolutionConfig& cfg) {
  parallel_for(pop.size(), cfg.threads, [&](std::size_t i) {
    auto brain = make_brain(cfg.substrate, pop[i].genome);
    EvalResult r = evaluate_fitness(*brain, cfg.world);
    pop[i].n_correct = r.n_correct;
    pop[i].fitness = r.fitness;
  });
}

std::vector<Individual> next_generation(const std::vector<Individual>& pop,
                                        const EvolutionConfig& cfg, Rng& rng,
                                        std::int64_t& next_id) {
  std::vector<double> cumulative(pop.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!(pop[i].fitness > 0.0))
      throw std::logic_error("selection requires positive fitness");
    total += pop[i].fitness;
    cumulative[i] = total;
  }
  std::vector<Individual> offspring;
  offspring.reserve(static_cast<std::size_t>(cfg.population_size));
  for (int j = 0; j < cfg.population_size; ++j) {
    double u = rng.next_unit() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = it == cumulative.end()
                          ? pop.size() - 1
                          : static_cast<std::size_t>(it - cumulative.begin());
    Individual child;
    child.id = next_id++;
    child.parent_id = pop[idx].id;
    child.genome = genome::mutate(pop[idx].genome, cfg.mutation, rng);
    offspring.push_back(std::move(child));
  }
  return offspring;
}

void validate_links(const AncestryArchive& archive) {
  for (std::size_t g = 1; g < archive.generations.size(); ++g) {
    std::unordered_set<std::int64_t> prev;
    for (const IndividualMeta& m : archive.generations[g - 1])
      prev.insert(m.id);
    for (const IndividualMeta& m : archive.generations[g])
      if (!prev.count(m.parent_id))
        throw std::runtime_error(
            "ancestry archive corrupt: generation " + std::to_string(g) +
            " references unknown parent " + std::to_string(m.parent_id));
  }
}

std::vector<IndividualMeta> reconstruct_lod(const AncestryArchive& archive) {
  if (archive.generations.empty())
    throw std::invalid_argument("archive has no generations");
  const auto& last = archive.generations.back();
  if (last.empty()) throw std::invalid_argument("final generation is empty");
  const IndividualMeta* best = &last[0];
  for (const IndividualMeta& m : last) {
    if (m.fitness > best->fitness ||
        (m.fitness == best->fitness && m.id < best->id))
      best = &m;
  }
  std::vector<IndividualMeta> path;
  path.resize(archive.generations.size());
  path.back() = *best;
  for (std::size_t g = archive.generations.size(); g-- > 1;) {
    std::int64_t want = path[g].parent_id;
    const IndividualMeta* found = nullptr;
    for (const IndividualMeta& m : archive.generations[g - 1])
      if (m.id == want) {
        found = &m;
        break;
      }
    if (!found)
      throw std::runtime_error(
          "ancestry archive corrupt: missing parent " + std::to_string(want) +
          " in generation " + std::to_string(g - 1));
    path[g - 1] = *found;
  }
  return path;
}

void thin_to_lod(AncestryArchive& archive) {
  std::unordered_set<std::int64_t> keep;
  for (const IndividualMeta& m : reconstruct_lod(archive)) keep.insert(m.id);
  for (auto it = archive.genomes.begin(); it != archive.genomes.end();) {
    if (keep.count(it->first))
      ++it;
    else
      it = archive.genomes.erase(it);
  }
}

Evolver::Evolver(const EvolutionConfig& cfg) : cfg_(cfg), master_(cfg.seed) {
  cfg_.validate();
  Rng init = master_.fork(0, 0);
  population_ = initial_population(cfg_, init, next_id_);
  evaluate_population(population_, cfg_);
  remember(population_);
}

Evolver::Evolver(const EvolutionConfig& cfg,
                 std::vector<std::vector<IndividualMeta>> history,
                 std::vector<Individual> population,
                 std::unordered_map<std::int64_t, genome::Genome> store,
                 std::int64_t next_id)
    : cfg_(cfg),
      master_(cfg.seed),
      history_(std::move(history)),
      population_(std::move(population)),
      store_(std::move(store)),
      next_id_(next_id) {
  cfg_.validate();
  if (history_.empty())
    throw std::invalid_argument("resume requires at least one generation");
  for (const auto& gen : history_)
    for (const IndividualMeta& m : gen) parent_of_[m.id] = m.parent_id;
}

void Evolver::advance() {
  Rng stream = master_.fork(1, generation());
  population_ = next_generation(population_, cfg_, stream, next_id_);
  evaluate_population(population_, cfg_);
  remember(population_);
  if (generation() % kPruneInterval == 0) prune_store();
}

void Evolver::remember(const std::vector<Individual>& pop) {
  std::vector<IndividualMeta> metas;
  metas.reserve(pop.size());
  for (const Individual& ind : pop) {
    metas.push_back(meta_of(ind));
    store_[ind.id] = ind.genome;
    parent_of_[ind.id] = ind.parent_id;
  }
  history_.push_back(std::move(metas));
}

void Evolver::prune_store() {
  std::unordered_set<std::int64_t> live;
  for (const Individual& ind : population_) {
    std::int64_t id = ind.id;
    while (id >= 0 && live.insert(id).second) {
      auto it = parent_of_.find(id);
      if (it == parent_of_.end()) break;
      id = it->second;
    }
  }
  for (auto it = store_.begin(); it != store_.end();) {
    if (live.count(it->first))
      ++it;
    else
      it = store_.erase(it);
  }
}

AncestryArchive Evolver::finish() {
  prune_store();
  AncestryArchive archive;
  archive.generations = std::move(history_);
  archive.genomes = std::move(store_);
  return archive;
}

AncestryArchive run_evolution(const EvolutionConfig& cfg) {
  Evolver evolver(cfg);
  for (int g = 0; g < cfg.generations; ++g) evolver.advance();
  AncestryArchive archive = evolver.finish();
  validate_links(archive);
  thin_to_lod(archive);
  return archive;
}

}  // namespace acplab::evo
