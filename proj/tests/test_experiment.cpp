#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "acplab/archive_io.hpp"
#include "acplab/csv.hpp"
#include "acplab/experiment.hpp"
#include "acplab/infotheory.hpp"
#include "acplab/world.hpp"

using namespace acplab;
using namespace acplab::experiment;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "acplab_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) return "<missing: " + p.string() + ">";
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> data_rows(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(bool(is));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_skipped = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

ExperimentConfig tiny_cfg(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.substrate = evo::Substrate::kMarkov;
  cfg.population_size = 8;
  cfg.generations = 6;
  cfg.replicates = 2;
  cfg.seed = 5;
  cfg.mutation.point_rate = 0.02;
  cfg.mutation.indel_rate_per_site = 0.005;
  cfg.mutation.chunk_min = 4;
  cfg.mutation.chunk_max = 8;
  cfg.mutation.min_len = 50;
  cfg.mutation.max_len = 400;
  cfg.initial_length = 100;
  cfg.start_codons = 2;
  cfg.noise_levels = {0.0, 0.1};
  cfg.noise_replicates = 3;
  cfg.lod_sample_interval = 3;
  cfg.output_dir = out.string();
  return cfg;
}

struct EnvGuard {
  EnvGuard(const char* k, const std::string& v) : key(k) {
    setenv(k, v.c_str(), 1);
  }
  ~EnvGuard() { unsetenv(key); }
  const char* key;
};

evo::EvolutionConfig replicate_evo_config(const ExperimentConfig& cfg,
                                          int replicate) {
  evo::EvolutionConfig e;
  e.substrate = cfg.substrate;
  e.population_size = cfg.population_size;
  e.generations = cfg.generations;
  e.seed = replicate_seed(cfg, replicate);
  e.mutation = cfg.mutation;
  e.initial_length = cfg.initial_length;
  e.start_codons = cfg.start_codons;
  e.threads = 1;
  return e;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("default noise levels sweep 0 to 0.5") {
  auto levels = default_noise_levels();
  REQUIRE(levels.size() == 11);
  CHECK(levels.front() == 0.0);
  CHECK(levels.back() == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t i = 1; i < levels.size(); ++i)
    CHECK(levels[i] > levels[i - 1]);
}

TEST_CASE("manifest round-trips the full config") {
  fs::path dir = fresh_dir("manifest_rt");
  ExperimentConfig cfg = tiny_cfg(dir / "run");
  cfg.substrate = evo::Substrate::kLstm;
  cfg.start_codons = 0;
  cfg.initial_length = 700;
  cfg.mutation.min_len = 600;
  cfg.mutation.max_len = 900;
  cfg.noise_levels = {0.0, 0.05, 0.25};
  write_manifest(dir / "manifest.txt", cfg);
  ExperimentConfig back = read_manifest(dir);
  CHECK(back == cfg);
}

TEST_CASE("config parser reports the offending key") {
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return parse_config(is, "test.cfg");
  };
  CHECK_THROWS_WITH_AS(parse("poplation_size = 10\n"),
                       doctest::Contains("poplation_size"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse("seed = 1\nseed = 2\n"),
                       doctest::Contains("seed"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse("generations = abc\n"),
                       doctest::Contains("generations"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse("no equals sign here\n"),
                       doctest::Contains("test.cfg:1"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse("noise_levels = 0.1,bogus\n"),
                       doctest::Contains("noise_levels"),
                       std::invalid_argument);

  ExperimentConfig cfg = parse(
      "substrate = markov\n"
      "# a comment\n"
      "population_size = 12\n"
      "  seed = 9  \n"
      "output_dir = /tmp/x\n");
  CHECK(cfg.population_size == 12);
  CHECK(cfg.seed == 9);
  CHECK(cfg.output_dir == "/tmp/x");
}

TEST_CASE("start_codons defaults to zero for ann substrates") {
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return parse_config(is, "test.cfg");
  };
  CHECK(parse("substrate = markov\n").start_codons == 4);
  CHECK(parse("substrate = rnn\n").start_codons == 0);
  CHECK(parse("substrate = lstm\n").start_codons == 0);
  CHECK(parse("substrate = rnn\nstart_codons = 7\n").start_codons == 7);
}

TEST_CASE("config validation names the failing field") {
  ExperimentConfig cfg = tiny_cfg("/tmp/x");
  cfg.output_dir = "";
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("output_dir"),
                       std::invalid_argument);
  cfg = tiny_cfg("/tmp/x");
  cfg.noise_levels = {0.2, 0.1};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("noise_levels"),
                       std::invalid_argument);
  cfg = tiny_cfg("/tmp/x");
  cfg.noise_levels = {0.0, 1.5};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("noise_levels"),
                       std::invalid_argument);
  cfg = tiny_cfg("/tmp/x");
  cfg.noise_replicates = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(),
                       doctest::Contains("noise_replicates"),
                       std::invalid_argument);
  cfg = tiny_cfg("/tmp/x");
  cfg.lod_sample_interval = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(),
                       doctest::Contains("lod_sample_interval"),
                       std::invalid_argument);
}

TEST_CASE("replicate seeds are deterministic and distinct") {
  ExperimentConfig cfg = tiny_cfg("/tmp/x");
  std::set<std::uint64_t> seeds;
  for (int r = 0; r < 50; ++r) {
    CHECK(replicate_seed(cfg, r) == replicate_seed(cfg, r));
    seeds.insert(replicate_seed(cfg, r));
  }
  CHECK(seeds.size() == 50);
  ExperimentConfig other = cfg;
  other.seed = cfg.seed + 1;
  CHECK(replicate_seed(other, 0) != replicate_seed(cfg, 0));
}

TEST_CASE("replicate_dir pads to three digits") {
  CHECK(replicate_dir("/runs/a", 0).filename() == "rep000");
  CHECK(replicate_dir("/runs/a", 42).filename() == "rep042");
  CHECK(replicate_dir("/runs/a", 123).filename() == "rep123");
}

TEST_CASE("linear_fit recovers exact lines") {
  LinearFit f = linear_fit({0.0, 1.0, 2.0}, {1.0, 4.0, 7.0});
  CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(linear_fit({1.0}, {2.0}), std::invalid_argument);
  CHECK_THROWS_AS(linear_fit({2.0, 2.0}, {1.0, 5.0}),
                  std::invalid_argument);
}

TEST_CASE("archive files round-trip") {
  fs::path dir = fresh_dir("archive_io");
  std::vector<std::vector<evo::IndividualMeta>> gens = {
      {{0, -1, 28, evo::fitness_from_correct(28)},
       {1, -1, 30, evo::fitness_from_correct(30)}},
      {{2, 0, 31, evo::fitness_from_correct(31)},
       {3, 1, 28, evo::fitness_from_correct(28)}},
      {{4, 2, 33, evo::fitness_from_correct(33)},
       {5, 2, 35, evo::fitness_from_correct(35)}},
  };
  io::write_meta_csv(dir / "archive.csv", {gens[0]}, "../manifest.txt");
  io::append_meta_csv(dir / "archive.csv", gens, 1, "../manifest.txt");
  auto back = io::read_meta_csv(dir / "archive.csv");
  REQUIRE(back.size() == 3);
  for (std::size_t g = 0; g < 3; ++g) {
    REQUIRE(back[g].size() == gens[g].size());
    for (std::size_t i = 0; i < gens[g].size(); ++i) {
      CHECK(back[g][i].id == gens[g][i].id);
      CHECK(back[g][i].parent_id == gens[g][i].parent_id);
      CHECK(back[g][i].n_correct == gens[g][i].n_correct);
      CHECK(back[g][i].fitness == gens[g][i].fitness);
    }
  }

  std::vector<evo::IndividualMeta> lod = {gens[0][0], gens[1][0], gens[2][1]};
  io::write_lod_csv(dir / "lod.csv", lod, "../manifest.txt");
  auto lod_back = io::read_lod_csv(dir / "lod.csv");
  REQUIRE(lod_back.size() == 3);
  CHECK(lod_back[2].id == 5);
  CHECK(lod_back[2].fitness == lod[2].fitness);

  std::unordered_map<std::int64_t, genome::Genome> store;
  store[5] = genome::Genome{1, 2, 3};
  store[0] = genome::Genome{9};
  store[2] = genome::Genome{};
  io::write_genomes_bin(dir / "genomes.bin", store);
  auto store_back = io::read_genomes_bin(dir / "genomes.bin");
  CHECK(store_back == store);

  // id-sorted output is independent of hash-map insertion order
  std::unordered_map<std::int64_t, genome::Genome> reordered;
  reordered[2] = store[2];
  reordered[0] = store[0];
  reordered[5] = store[5];
  io::write_genomes_bin(dir / "genomes2.bin", reordered);
  CHECK(slurp(dir / "genomes.bin") == slurp(dir / "genomes2.bin"));

  io::Checkpoint ck;
  ck.generation = 12;
  ck.next_id = 99;
  evo::Individual ind;
  ind.id = 7;
  ind.parent_id = 3;
  ind.genome = genome::Genome{4, 2};
  ind.n_correct = 40;
  ind.fitness = evo::fitness_from_correct(40);
  ck.population = {ind};
  ck.store = store;
  io::write_checkpoint(dir / "ck.bin", ck);
  io::Checkpoint ck_back = io::read_checkpoint(dir / "ck.bin");
  CHECK(ck_back.generation == 12);
  CHECK(ck_back.next_id == 99);
  REQUIRE(ck_back.population.size() == 1);
  CHECK(ck_back.population[0].id == 7);
  CHECK(ck_back.population[0].parent_id == 3);
  CHECK(ck_back.population[0].genome == ind.genome);
  CHECK(ck_back.population[0].n_correct == 40);
  CHECK(ck_back.population[0].fitness == ind.fitness);
  CHECK(ck_back.store == store);

  CHECK_THROWS_AS(io::read_meta_csv(dir / "nope.csv"), std::runtime_error);
  CHECK_THROWS_AS(io::read_checkpoint(dir / "nope.bin"),
                  std::runtime_error);
}

TEST_CASE("evolve writes a complete run tree and skips finished work") {
  fs::path base = fresh_dir("evolve_tree");
  fs::path run = base / "run";
  ExperimentConfig cfg = tiny_cfg(run);
  cmd_evolve(cfg, 1);

  CHECK(fs::exists(run / "manifest.txt"));
  for (int r = 0; r < cfg.replicates; ++r) {
    fs::path rd = replicate_dir(run, r);
    CHECK(fs::exists(rd / "archive.csv"));
    CHECK(fs::exists(rd / "lod.csv"));
    CHECK(fs::exists(rd / "genomes.bin"));
    CHECK_FALSE(fs::exists(rd / "checkpoint.bin"));
  }

  auto history = io::read_meta_csv(replicate_dir(run, 0) / "archive.csv");
  REQUIRE(history.size() == 7);
  for (const auto& gen : history) CHECK(gen.size() == 8);
  evo::AncestryArchive archive;
  archive.generations = history;
  evo::validate_links(archive);

  auto lod = io::read_lod_csv(replicate_dir(run, 0) / "lod.csv");
  REQUIRE(lod.size() == 7);
  for (std::size_t g = 1; g < lod.size(); ++g)
    CHECK(lod[g].parent_id == lod[g - 1].id);

  auto genomes = io::read_genomes_bin(replicate_dir(run, 0) / "genomes.bin");
  CHECK(genomes.size() == lod.size());
  for (const auto& m : lod) CHECK(genomes.count(m.id) == 1);

  // a second invocation must not rewrite anything
  std::string before = slurp(replicate_dir(run, 0) / "archive.csv") +
                       slurp(replicate_dir(run, 0) / "lod.csv") +
                       slurp(replicate_dir(run, 0) / "genomes.bin");
  cmd_evolve(cfg, 1);
  std::string after = slurp(replicate_dir(run, 0) / "archive.csv") +
                      slurp(replicate_dir(run, 0) / "lod.csv") +
                      slurp(replicate_dir(run, 0) / "genomes.bin");
  CHECK(before == after);
}

TEST_CASE("evolve refuses an output dir holding a different config") {
  fs::path base = fresh_dir("evolve_conflict");
  fs::path run = base / "run";
  ExperimentConfig cfg = tiny_cfg(run);
  cmd_evolve(cfg, 1);
  ExperimentConfig other = cfg;
  other.seed = cfg.seed + 1;
  CHECK_THROWS_WITH_AS(cmd_evolve(other, 1),
                       doctest::Contains("different config"),
                       std::runtime_error);
}

TEST_CASE("analyze emits summaries consistent with the archives") {
  fs::path base = fresh_dir("analyze");
  fs::path run = base / "run";
  ExperimentConfig cfg = tiny_cfg(run);
  cmd_evolve(cfg, 1);
  cmd_analyze(run, 1);

  fs::path rd = replicate_dir(run, 0);
  auto lod = io::read_lod_csv(rd / "lod.csv");

  auto rows = data_rows(rd / "analysis.csv");
  REQUIRE(rows.size() == 3);  // generations 0, 3, 6
  CHECK(rows[0][0] == "0");
  CHECK(rows[1][0] == "3");
  CHECK(rows[2][0] == "6");
  CHECK(parse_i64(rows[2][1]) == lod.back().n_correct);

  // R printed in analysis.csv must reproduce exactly from the trace dump
  std::ifstream trace_is(rd / "trace.csv");
  auto trials = world::read_trace_csv(trace_is);
  REQUIRE(trials.size() == 64);
  for (const auto& t : trials) CHECK(t.size() == 32);
  double r_from_trace =
      info::representation_R(info::trace_from_records(trials));
  CHECK(parse_double(rows[2][3]) == r_from_trace);

  std::ifstream mat_is(rd / "rep_matrix.csv");
  info::RepMatrix m = info::read_matrix_csv(mat_is);
  CHECK(parse_double(rows[2][4]) == info::node_smearedness(m));
  CHECK(parse_double(rows[2][5]) == info::concept_smearedness(m));

  auto summary = data_rows(run / "analysis_summary.csv");
  REQUIRE(summary.size() == 2);
  CHECK(parse_i64(summary[0][1]) == lod.back().n_correct);
  CHECK(summary[0][6] == (lod.back().n_correct == 64 ? "1" : "0"));
}

TEST_CASE("robustness reproduces the noise-free score at p = 0") {
  fs::path base = fresh_dir("robustness");
  fs::path run = base / "run";
  ExperimentConfig cfg = tiny_cfg(run);
  cmd_evolve(cfg, 1);
  cmd_robustness(run, 1);

  for (int r = 0; r < cfg.replicates; ++r) {
    fs::path rd = replicate_dir(run, r);
    auto lod = io::read_lod_csv(rd / "lod.csv");
    auto rows = data_rows(rd / "robustness.csv");
    REQUIRE(rows.size() == cfg.noise_levels.size());
    CHECK(parse_double(rows[0][0]) == 0.0);
    CHECK(parse_double(rows[0][1]) == lod.back().n_correct / 64.0);
    CHECK(parse_double(rows[0][2]) == 0.0);  // identical noise-free repeats
  }
  auto summary = data_rows(run / "robustness_summary.csv");
  REQUIRE(summary.size() == 2);
}

TEST_CASE("report emits the seven aggregate tables") {
  fs::path base = fresh_dir("report");
  fs::path run = base / "run";
  ExperimentConfig cfg = tiny_cfg(run);
  cmd_evolve(cfg, 1);
  cmd_analyze(run, 1);
  cmd_robustness(run, 1);
  fs::path out = base / "tables";
  cmd_report({run}, out);

  for (const char* name :
       {"fitness_over_generations.csv", "r_over_generations.csv",
        "m_vectors.csv", "smearedness.csv", "robustness_curves.csv",
        "smearedness_vs_robustness.csv", "regression.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(out / name));
    std::string content = slurp(out / name);
    CHECK(content.rfind("# runs: run\n", 0) == 0);
  }
}

TEST_CASE("environment variable overrides the configured output dir") {
  fs::path base = fresh_dir("env_override");
  fs::path ignored = base / "ignored";
  fs::path actual = base / "actual";
  ExperimentConfig cfg = tiny_cfg(ignored);
  cfg.replicates = 1;
  cfg.generations = 2;
  {
    EnvGuard guard(kOutputDirEnvVar, actual.string());
    cmd_evolve(cfg, 1);
  }
  CHECK(fs::exists(actual / "manifest.txt"));
  CHECK(fs::exists(replicate_dir(actual, 0) / "lod.csv"));
  CHECK_FALSE(fs::exists(ignored));
}

TEST_CASE("pipelines are byte-identical across filesystem locations") {
  fs::path base_x = fresh_dir("determinism_x");
  fs::path base_y = fresh_dir("determinism_y");

  auto pipeline = [](const fs::path& base) {
    fs::path run = base / "run";
    ExperimentConfig cfg = tiny_cfg(run);
    cmd_evolve(cfg, 1);
    cmd_analyze(run, 1);
    cmd_robustness(run, 1);
    cmd_report({run}, base / "tables");
  };
  pipeline(base_x);
  pipeline(base_y);

  std::vector<std::string> rels = {
      "run/analysis_summary.csv",
      "run/robustness_summary.csv",
      "tables/fitness_over_generations.csv",
      "tables/r_over_generations.csv",
      "tables/m_vectors.csv",
      "tables/smearedness.csv",
      "tables/robustness_curves.csv",
      "tables/smearedness_vs_robustness.csv",
      "tables/regression.csv",
  };
  for (int r = 0; r < 2; ++r) {
    fs::path rd = replicate_dir(fs::path("run"), r);
    for (const char* f : {"archive.csv", "lod.csv", "genomes.bin",
                          "analysis.csv", "rep_matrix.csv", "trace.csv",
                          "robustness.csv"})
      rels.push_back((rd / f).string());
  }
  for (const std::string& rel : rels) {
    CAPTURE(rel);
    CHECK(slurp(base_x / rel) == slurp(base_y / rel));
  }
}

TEST_CASE("an interrupted replicate resumes to the exact same bytes") {
  fs::path base = fresh_dir("resume");
  ExperimentConfig ref_cfg = tiny_cfg(base / "ref");
  ref_cfg.replicates = 1;
  ref_cfg.generations = 30;
  cmd_evolve(ref_cfg, 1);

  // Build the mid-run state a killed process would leave behind: archive
  // rows up to the checkpointed generation and checkpoint.bin.
  evo::Evolver ev(replicate_evo_config(ref_cfg, 0));
  for (int g = 0; g < 12; ++g) ev.advance();
  ev.prune_store();
  auto snapshot_history = ev.history();
  io::Checkpoint snapshot{12, ev.next_id(), ev.population(),
                          ev.genome_store()};

  ExperimentConfig cfg_b = ref_cfg;
  cfg_b.output_dir = (base / "resumed").string();
  fs::path run_b = base / "resumed";
  fs::create_directories(replicate_dir(run_b, 0));
  write_manifest(run_b / "manifest.txt", cfg_b);
  io::write_meta_csv(replicate_dir(run_b, 0) / "archive.csv",
                     snapshot_history, "../manifest.txt");
  io::write_checkpoint(replicate_dir(run_b, 0) / "checkpoint.bin", snapshot);
  cmd_evolve(cfg_b, 1);

  // Same again, but with archive rows that ran ahead of the checkpoint;
  // resume must truncate them and still converge to identical output.
  ev.advance();
  ev.advance();
  ExperimentConfig cfg_c = ref_cfg;
  cfg_c.output_dir = (base / "truncated").string();
  fs::path run_c = base / "truncated";
  fs::create_directories(replicate_dir(run_c, 0));
  write_manifest(run_c / "manifest.txt", cfg_c);
  io::write_meta_csv(replicate_dir(run_c, 0) / "archive.csv", ev.history(),
                     "../manifest.txt");
  io::write_checkpoint(replicate_dir(run_c, 0) / "checkpoint.bin", snapshot);
  cmd_evolve(cfg_c, 1);

  fs::path ref_rd = replicate_dir(base / "ref", 0);
  for (const fs::path& run : {run_b, run_c}) {
    CAPTURE(run.string());
    fs::path rd = replicate_dir(run, 0);
    CHECK_FALSE(fs::exists(rd / "checkpoint.bin"));
    for (const char* f : {"archive.csv", "lod.csv", "genomes.bin"}) {
      CAPTURE(f);
      CHECK(slurp(rd / f) == slurp(ref_rd / f));
    }
  }
}

}  // TEST_SUITE
