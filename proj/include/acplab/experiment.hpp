#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "acplab/evolution.hpp"
#include "acplab/genome.hpp"

namespace acplab::experiment {

// Flat key=value configuration shared by all pipeline commands.  Unknown
// keys are rejected at parse time with the offending name.
struct ExperimentConfig {
  evo::Substrate substrate = evo::Substrate::kMarkov;
  int population_size = 100;
  int generations = 2000;
  int replicates = 20;
  std::uint64_t seed = 1;
  genome::MutationConfig mutation;
  int initial_length = 5000;
  int start_codons = 4;  // Markov founders only; ANNs ignore it
  std::vector<double> noise_levels;
  int noise_replicates = 20;
  int lod_sample_interval = 100;
  std::string output_dir;

  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Default sweep 0.00 to 0.50 in steps of 0.05.
std::vector<double> default_noise_levels();

ExperimentConfig parse_config(std::istream& is, const std::string& source);
ExperimentConfig load_config_file(const std::filesystem::path& path);

// manifest.txt: the exact config as key=value lines under a comment
// header; the only timestamp in any output lives here.
void write_manifest(const std::filesystem::path& path,
                    const ExperimentConfig& cfg);
ExperimentConfig read_manifest(const std::filesystem::path& dir);

// Seed for replicate index r, derived from the master seed.
std::uint64_t replicate_seed(const ExperimentConfig& cfg, int replicate);

std::filesystem::path replicate_dir(const std::filesystem::path& run_dir,
                                    int replicate);

// evolve: runs cfg.replicates independent seeded runs into
// cfg.output_dir (ACPLAB_OUTPUT_DIR overrides), writing per-replicate
// archive.csv, lod.csv, genomes.bin, and the run manifest.  Interrupted
// replicates resume from their checkpoint; finished ones are skipped.
void cmd_evolve(const ExperimentConfig& cfg, unsigned threads);

// analyze: for each replicate, walks the line of descent at
// lod_sample_interval spacing (plus the final individual), replays all 64
// trials noise-free, and writes analysis.csv, rep_matrix.csv, trace.csv,
// and a run-level analysis_summary.csv.  Consumes no randomness.
void cmd_analyze(const std::filesystem::path& run_dir, unsigned threads);

// robustness: noise sweep over each replicate's final LOD brain; writes
// per-replicate robustness.csv and run-level robustness_summary.csv.
void cmd_robustness(const std::filesystem::path& run_dir, unsigned threads);

// report: aggregates analyzed runs (one substrate each) into plot-ready
// tables under out_dir.
void cmd_report(const std::vector<std::filesystem::path>& run_dirs,
                const std::filesystem::path& out_dir);

// Least-squares fit y = slope x + intercept; used for the regression
// through the three substrate means.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x,
                     const std::vector<double>& y);

inline constexpr const char* kOutputDirEnvVar = "ACPLAB_OUTPUT_DIR";

}  // namespace acplab::experiment
