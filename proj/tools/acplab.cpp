#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acplab/experiment.hpp"
#include "acplab/parallel.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"acplab: evolve block-catching agents and quantify where "
               "their brains store world knowledge"};
  app.require_subcommand(1);

  unsigned threads = acplab::default_thread_count();

  std::string config_path;
  CLI::App* evolve = app.add_subcommand(
      "evolve", "run seeded evolution replicates from a config file");
  evolve->add_option("--config", config_path, "key=value config file")
      ->required();
  evolve->add_option("--threads", threads,
                     "worker threads (never changes results)");

  std::string run_dir;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "representation analysis along each line of descent");
  analyze->add_option("--run", run_dir, "run directory written by evolve")
      ->required();
  analyze->add_option("--threads", threads,
                      "worker threads (never changes results)");

  std::string rob_dir;
  CLI::App* robustness = app.add_subcommand(
      "robustness", "sensor-noise sweep over each final agent");
  robustness->add_option("--run", rob_dir, "run directory written by evolve")
      ->required();
  robustness->add_option("--threads", threads,
                         "worker threads (never changes results)");

  std::vector<std::string> report_runs;
  std::string report_out;
  CLI::App* report = app.add_subcommand(
      "report", "aggregate analyzed runs into plot-ready tables");
  report->add_option("--runs", report_runs, "analyzed run directories")
      ->required()
      ->expected(-1);
  report->add_option("--out", report_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (evolve->parsed()) {
      acplab::experiment::cmd_evolve(
          acplab::experiment::load_config_file(config_path), threads);
    } else if (analyze->parsed()) {
      acplab::experiment::cmd_analyze(run_dir, threads);
    } else if (robustness->parsed()) {
      acplab::experiment::cmd_robustness(rob_dir, threads);
    } else if (report->parsed()) {
      std::vector<fs::path> dirs(report_runs.begin(), report_runs.end());
      acplab::experiment::cmd_report(dirs, report_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
