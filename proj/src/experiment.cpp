#include "acplab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "acplab/archive_io.hpp"
#include "acplab/csv.hpp"
#include "acplab/infotheory.hpp"
#include "acplab/parallel.hpp"
#include "acplab/world.hpp"

namespace acplab::experiment {

namespace fs = std::filesystem;

namespace {

constexpr int kCheckpointEvery = 250;
constexpr const char* kManifestName = "manifest.txt";
constexpr const char* kManifestRef = "../manifest.txt";

int parse_int_field(const std::string& key, const std::string& value) {
  try {
    return static_cast<int>(parse_i64(value));
  } catch (const std::exception&) {
    throw std::invalid_argument("config field '" + key +
                                "' is not an integer: '" + value + "'");
  }
}

std::uint64_t parse_u64_field(const std::string& key,
                              const std::string& value) {
  try {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config field '" + key +
                                "' is not an unsigned integer: '" + value +
                                "'");
  }
}

double parse_double_field(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const std::exception&) {
    throw std::invalid_argument("config field '" + key +
                                "' is not a number: '" + value + "'");
  }
}

std::vector<double> parse_double_list_field(const std::string& key,
                                            const std::string& value) {
  std::vector<double> out;
  for (const std::string& part : split_csv_line(value))
    out.push_back(parse_double_field(key, part));
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += fmt_double(v[i]);
  }
  return out;
}

}  // namespace

std::vector<double> default_noise_levels() {
  std::vector<double> levels;
  for (int i = 0; i <= 10; ++i) levels.push_back(0.05 * i);
  return levels;
}

void ExperimentConfig::validate() const {
  if (population_size < 2)
    throw std::invalid_argument("config field 'population_size' must be >= 2");
  if (generations < 1)
    throw std::invalid_argument("config field 'generations' must be >= 1");
  if (replicates < 1)
    throw std::invalid_argument("config field 'replicates' must be >= 1");
  mutation.validate();
  if (initial_length < mutation.min_len || initial_length > mutation.max_len)
    throw std::invalid_argument(
        "config field 'initial_length' outside genome length bounds");
  if (start_codons < 0)
    throw std::invalid_argument("config field 'start_codons' must be >= 0");
  if (noise_levels.empty())
    throw std::invalid_argument("config field 'noise_levels' is empty");
  for (std::size_t i = 0; i < noise_levels.size(); ++i) {
    if (noise_levels[i] < 0.0 || noise_levels[i] > 1.0)
      throw std::invalid_argument(
          "config field 'noise_levels' has an entry outside [0, 1]");
    if (i && noise_levels[i] <= noise_levels[i - 1])
      throw std::invalid_argument(
          "config field 'noise_levels' must be strictly ascending");
  }
  if (noise_replicates < 1)
    throw std::invalid_argument(
        "config field 'noise_replicates' must be >= 1");
  if (lod_sample_interval < 1)
    throw std::invalid_argument(
        "config field 'lod_sample_interval' must be >= 1");
  if (output_dir.empty())
    throw std::invalid_argument("config field 'output_dir' is required");
}

ExperimentConfig parse_config(std::istream& is, const std::string& source) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(source + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument(source + ":" + std::to_string(line_no) +
                                  ": empty key");
    if (!kv.emplace(key, value).second)
      throw std::invalid_argument("duplicate config key '" + key + "' in " +
                                  source);
  }

  ExperimentConfig cfg;
  cfg.noise_levels = default_noise_levels();
  bool start_codons_set = false;
  for (const auto& [key, value] : kv) {
    if (key == "substrate")
      cfg.substrate = evo::substrate_from_string(value);
    else if (key == "population_size")
      cfg.population_size = parse_int_field(key, value);
    else if (key == "generations")
      cfg.generations = parse_int_field(key, value);
    else if (key == "replicates")
      cfg.replicates = parse_int_field(key, value);
    else if (key == "seed")
      cfg.seed = parse_u64_field(key, value);
    else if (key == "point_rate")
      cfg.mutation.point_rate = parse_double_field(key, value);
    else if (key == "indel_rate_per_site")
      cfg.mutation.indel_rate_per_site = parse_double_field(key, value);
    else if (key == "chunk_min")
      cfg.mutation.chunk_min = parse_int_field(key, value);
    else if (key == "chunk_max")
      cfg.mutation.chunk_max = parse_int_field(key, value);
    else if (key == "min_len")
      cfg.mutation.min_len = parse_int_field(key, value);
    else if (key == "max_len")
      cfg.mutation.max_len = parse_int_field(key, value);
    else if (key == "initial_length")
      cfg.initial_length = parse_int_field(key, value);
    else if (key == "start_codons") {
      cfg.start_codons = parse_int_field(key, value);
      start_codons_set = true;
    } else if (key == "noise_levels")
      cfg.noise_levels = parse_double_list_field(key, value);
    else if (key == "noise_replicates")
      cfg.noise_replicates = parse_int_field(key, value);
    else if (key == "lod_sample_interval")
      cfg.lod_sample_interval = parse_int_field(key, value);
    else if (key == "output_dir")
      cfg.output_dir = value;
    else
      throw std::invalid_argument("unknown config key '" + key + "' in " +
                                  source);
  }
  if (!start_codons_set && cfg.substrate != evo::Substrate::kMarkov)
    cfg.start_codons = 0;
  return cfg;
}

ExperimentConfig load_config_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is)
    throw std::runtime_error("cannot open config file " + path.string());
  return parse_config(is, path.string());
}

void write_manifest(const fs::path& path, const ExperimentConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  std::time_t now = std::time(nullptr);
  char stamp[32] = "unknown";
  if (std::tm tm{}; gmtime_r(&now, &tm) != nullptr)
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  os << "# acplab run manifest\n";
  os << "# created: " << stamp << '\n';
  os << "substrate = " << evo::to_string(cfg.substrate) << '\n';
  os << "population_size = " << cfg.population_size << '\n';
  os << "generations = " << cfg.generations << '\n';
  os << "replicates = " << cfg.replicates << '\n';
  os << "seed = " << cfg.seed << '\n';
  os << "point_rate = " << fmt_double(cfg.mutation.point_rate) << '\n';
  os << "indel_rate_per_site = " << fmt_double(cfg.mutation.indel_rate_per_site)
     << '\n';
  os << "chunk_min = " << cfg.mutation.chunk_min << '\n';
  os << "chunk_max = " << cfg.mutation.chunk_max << '\n';
  os << "min_len = " << cfg.mutation.min_len << '\n';
  os << "max_len = " << cfg.mutation.max_len << '\n';
  os << "initial_length = " << cfg.initial_length << '\n';
  os << "start_codons = " << cfg.start_codons << '\n';
  os << "noise_levels = " << join_doubles(cfg.noise_levels) << '\n';
  os << "noise_replicates = " << cfg.noise_replicates << '\n';
  os << "lod_sample_interval = " << cfg.lod_sample_interval << '\n';
  os << "output_dir = " << cfg.output_dir << '\n';
}

ExperimentConfig read_manifest(const fs::path& dir) {
  return load_config_file(dir / kManifestName);
}

std::uint64_t replicate_seed(const ExperimentConfig& cfg, int replicate) {
  return Rng(cfg.seed).fork(2, replicate).seed();
}

fs::path replicate_dir(const fs::path& run_dir, int replicate) {
  char name[16];
  std::snprintf(name, sizeof name, "rep%03d", replicate);
  return run_dir / name;
}

namespace {

evo::EvolutionConfig evolution_config(const ExperimentConfig& cfg,
                                      int replicate, unsigned threads) {
  evo::EvolutionConfig e;
  e.substrate = cfg.substrate;
  e.population_size = cfg.population_size;
  e.generations = cfg.generations;
  e.seed = replicate_seed(cfg, replicate);
  e.mutation = cfg.mutation;
  e.initial_length = cfg.initial_length;
  e.start_codons = cfg.start_codons;
  e.threads = threads;
  return e;
}

void run_replicate(const ExperimentConfig& cfg, const fs::path& run_dir,
                   int replicate, unsigned threads) {
  fs::path rd = replicate_dir(run_dir, replicate);
  fs::create_directories(rd);
  fs::path archive_path = rd / "archive.csv";
  fs::path lod_path = rd / "lod.csv";
  fs::path genomes_path = rd / "genomes.bin";
  fs::path ckpt_path = rd / "checkpoint.bin";

  if (fs::exists(lod_path) && fs::exists(genomes_path) &&
      !fs::exists(ckpt_path))
    return;  // finished earlier

  evo::EvolutionConfig ecfg = evolution_config(cfg, replicate, threads);
  std::optional<evo::Evolver> ev;
  if (fs::exists(ckpt_path)) {
    io::Checkpoint ck = io::read_checkpoint(ckpt_path);
    auto history = io::read_meta_csv(archive_path);
    auto have = static_cast<std::int64_t>(history.size());
    if (have < ck.generation + 1)
      throw std::runtime_error("archive.csv behind checkpoint in " +
                               rd.string());
    if (have > ck.generation + 1) {
      history.resize(static_cast<std::size_t>(ck.generation + 1));
      io::write_meta_csv(archive_path, history, kManifestRef);
    }
    ev.emplace(ecfg, std::move(history), std::move(ck.population),
               std::move(ck.store), ck.next_id);
  } else {
    ev.emplace(ecfg);
    io::write_meta_csv(archive_path, ev->history(), kManifestRef);
  }

  std::size_t rows_written = ev->history().size();
  while (ev->generation() < ecfg.generations) {
    ev->advance();
    bool at_checkpoint = ev->generation() % kCheckpointEvery == 0;
    bool at_end = ev->generation() == ecfg.generations;
    if (!at_checkpoint && !at_end) continue;
    io::append_meta_csv(archive_path, ev->history(), rows_written,
                        kManifestRef);
    rows_written = ev->history().size();
    if (!at_end) {
      ev->prune_store();
      io::write_checkpoint(
          ckpt_path, io::Checkpoint{ev->generation(), ev->next_id(),
                                    ev->population(), ev->genome_store()});
    }
  }

  evo::AncestryArchive archive = ev->finish();
  evo::validate_links(archive);
  std::vector<evo::IndividualMeta> lod = evo::reconstruct_lod(archive);
  evo::thin_to_lod(archive);
  io::write_lod_csv(lod_path, lod, kManifestRef);
  io::write_genomes_bin(genomes_path, archive.genomes);
  fs::remove(ckpt_path);
}

}  // namespace

void cmd_evolve(const ExperimentConfig& cfg_in, unsigned threads) {
  ExperimentConfig cfg = cfg_in;
  if (const char* env = std::getenv(kOutputDirEnvVar); env && *env)
    cfg.output_dir = env;
  cfg.validate();
  fs::path run_dir = cfg.output_dir;
  fs::create_directories(run_dir);
  fs::path manifest_path = run_dir / kManifestName;
  if (fs::exists(manifest_path)) {
    // identity excludes output_dir: a relocated run dir is the same
    // experiment
    ExperimentConfig existing = read_manifest(run_dir);
    existing.output_dir.clear();
    ExperimentConfig here = cfg;
    here.output_dir.clear();
    if (!(existing == here))
      throw std::runtime_error(
          "output_dir already holds a run with a different config: " +
          run_dir.string());
  } else {
    write_manifest(manifest_path, cfg);
  }
  for (int r = 0; r < cfg.replicates; ++r)
    run_replicate(cfg, run_dir, r, threads);
}

namespace {

struct AgentAnalysis {
  double r = 0.0;
  double s_n = 0.0;
  double s_c = 0.0;
  info::RepMatrix m;
  std::vector<std::vector<world::TrialRecordRow>> trials;
};

AgentAnalysis analyze_genome(evo::Substrate substrate,
                             const genome::Genome& g,
                             const world::WorldConfig& wcfg) {
  auto brain = evo::make_brain(substrate, g);
  AgentAnalysis out;
  Rng unused(0);
  for (const world::TrialSpec& spec : world::enumerate_specs(wcfg))
    out.trials.push_back(
        world::run_trial(*brain, spec, wcfg, 0.0, unused, true).rows);
  info::StateTrace trace = info::trace_from_records(out.trials);
  out.r = info::representation_R(trace);
  out.m = info::representation_matrix(trace);
  out.s_n = info::node_smearedness(out.m);
  out.s_c = info::concept_smearedness(out.m);
  return out;
}

std::vector<std::size_t> sampled_generations(std::size_t count,
                                             int interval) {
  std::vector<std::size_t> gens;
  for (std::size_t g = 0; g < count;
       g += static_cast<std::size_t>(interval))
    gens.push_back(g);
  if (gens.empty() || gens.back() != count - 1) gens.push_back(count - 1);
  return gens;
}

}  // namespace

void cmd_analyze(const fs::path& run_dir, unsigned threads) {
  ExperimentConfig cfg = read_manifest(run_dir);
  world::WorldConfig wcfg;
  std::ofstream summary(run_dir / "analysis_summary.csv");
  if (!summary)
    throw std::runtime_error("cannot write analysis_summary.csv in " +
                             run_dir.string());
  summary << "# manifest: manifest.txt\n";
  summary << "replicate,final_n_correct,final_fitness,R,S_N,S_C,perfect\n";

  for (int r = 0; r < cfg.replicates; ++r) {
    fs::path rd = replicate_dir(run_dir, r);
    std::vector<evo::IndividualMeta> lod = io::read_lod_csv(rd / "lod.csv");
    auto genomes = io::read_genomes_bin(rd / "genomes.bin");
    std::vector<std::size_t> gens =
        sampled_generations(lod.size(), cfg.lod_sample_interval);

    std::vector<AgentAnalysis> results(gens.size());
    parallel_for(gens.size(), threads, [&](std::size_t k) {
      const evo::IndividualMeta& m = lod[gens[k]];
      auto it = genomes.find(m.id);
      if (it == genomes.end())
        throw std::runtime_error("genome archive in " + rd.string() +
                                 " is missing LOD id " + std::to_string(m.id));
      results[k] = analyze_genome(cfg.substrate, it->second, wcfg);
    });

    std::ofstream os(rd / "analysis.csv");
    if (!os)
      throw std::runtime_error("cannot write analysis.csv in " + rd.string());
    os << "# manifest: " << kManifestRef << '\n';
    os << "generation,n_correct,fitness,R,S_N,S_C\n";
    for (std::size_t k = 0; k < gens.size(); ++k) {
      const evo::IndividualMeta& m = lod[gens[k]];
      const AgentAnalysis& a = results[k];
      os << gens[k] << ',' << m.n_correct << ',' << fmt_double(m.fitness)
         << ',' << fmt_double(a.r) << ',' << fmt_double(a.s_n) << ','
         << fmt_double(a.s_c) << '\n';
    }

    const AgentAnalysis& fin = results.back();
    {
      std::ofstream mos(rd / "rep_matrix.csv");
      if (!mos)
        throw std::runtime_error("cannot write rep_matrix.csv in " +
                                 rd.string());
      mos << "# manifest: " << kManifestRef << '\n';
      info::write_matrix_csv(mos, fin.m);
    }
    {
      std::ofstream tos(rd / "trace.csv");
      if (!tos)
        throw std::runtime_error("cannot write trace.csv in " + rd.string());
      tos << "# manifest: " << kManifestRef << '\n';
      world::write_trace_csv(tos, fin.trials);
    }

    const evo::IndividualMeta& last = lod.back();
    summary << r << ',' << last.n_correct << ',' << fmt_double(last.fitness)
            << ',' << fmt_double(fin.r) << ',' << fmt_double(fin.s_n) << ','
            << fmt_double(fin.s_c) << ',' << (last.n_correct == 64 ? 1 : 0)
            << '\n';
  }
}

void cmd_robustness(const fs::path& run_dir, unsigned threads) {
  ExperimentConfig cfg = read_manifest(run_dir);
  world::WorldConfig wcfg;
  auto specs = world::enumerate_specs(wcfg);
  std::ofstream summary(run_dir / "robustness_summary.csv");
  if (!summary)
    throw std::runtime_error("cannot write robustness_summary.csv in " +
                             run_dir.string());
  summary << "# manifest: manifest.txt\n";
  summary << "replicate,final_n_correct,scalar_robustness\n";

  for (int r = 0; r < cfg.replicates; ++r) {
    fs::path rd = replicate_dir(run_dir, r);
    std::vector<evo::IndividualMeta> lod = io::read_lod_csv(rd / "lod.csv");
    auto genomes = io::read_genomes_bin(rd / "genomes.bin");
    const evo::IndividualMeta& last = lod.back();
    auto it = genomes.find(last.id);
    if (it == genomes.end())
      throw std::runtime_error("genome archive in " + rd.string() +
                               " is missing LOD id " + std::to_string(last.id));
    const genome::Genome& g = it->second;
    std::uint64_t rep_seed = replicate_seed(cfg, r);

    std::vector<double> means(cfg.noise_levels.size());
    std::vector<double> stderrs(cfg.noise_levels.size());
    parallel_for(cfg.noise_levels.size(), threads, [&](std::size_t li) {
      auto brain = evo::make_brain(cfg.substrate, g);
      double p = cfg.noise_levels[li];
      std::vector<double> fracs(static_cast<std::size_t>(
          cfg.noise_replicates));
      for (int rep = 0; rep < cfg.noise_replicates; ++rep) {
        Rng rng = Rng(rep_seed).fork(3, li, rep);
        int correct = 0;
        for (const world::TrialSpec& spec : specs)
          if (world::run_trial(*brain, spec, wcfg, p, rng, false).success)
            ++correct;
        fracs[static_cast<std::size_t>(rep)] =
            static_cast<double>(correct) / static_cast<double>(specs.size());
      }
      double mean = 0.0;
      for (double f : fracs) mean += f;
      mean /= static_cast<double>(fracs.size());
      double var = 0.0;
      for (double f : fracs) var += (f - mean) * (f - mean);
      var = fracs.size() > 1
                ? var / static_cast<double>(fracs.size() - 1)
                : 0.0;
      means[li] = mean;
      stderrs[li] = std::sqrt(var / static_cast<double>(fracs.size()));
    });

    std::ofstream os(rd / "robustness.csv");
    if (!os)
      throw std::runtime_error("cannot write robustness.csv in " +
                               rd.string());
    os << "# manifest: " << kManifestRef << '\n';
    os << "p,mean,stderr\n";
    for (std::size_t li = 0; li < cfg.noise_levels.size(); ++li)
      os << fmt_double(cfg.noise_levels[li]) << ',' << fmt_double(means[li])
         << ',' << fmt_double(stderrs[li]) << '\n';

    double scalar = 0.0;
    for (double m : means) scalar += m;
    scalar /= static_cast<double>(means.size());
    summary << r << ',' << last.n_correct << ',' << fmt_double(scalar)
            << '\n';
  }
}

}  // namespace acplab::experiment
