#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "acplab/archive_io.hpp"
#include "acplab/csv.hpp"
#include "acplab/experiment.hpp"
#include "acplab/infotheory.hpp"

namespace acplab::experiment {

namespace fs = std::filesystem;

LinearFit linear_fit(const std::vector<double>& x,
                     const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit needs at least two points");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("linear_fit is degenerate: constant x");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

namespace {

// Per-replicate slice of one analyzed run, loaded from the run's output
// files; report aggregation works purely from these.
struct ReplicateData {
  int replicate = 0;
  bool perfect = false;
  int final_n_correct = 0;
  double r = 0.0;
  double s_n = 0.0;
  double s_c = 0.0;
  info::RepMatrix m;
  std::vector<evo::IndividualMeta> lod;
  // generation -> R along the LOD at the analysis sampling points
  std::vector<std::pair<std::int64_t, double>> r_samples;
  // (p, mean) robustness curve and its scalar summary
  std::vector<std::pair<double, double>> curve;
  double robustness = 0.0;
  bool has_robustness = false;
};

struct RunData {
  std::string label;
  evo::Substrate substrate;
  std::vector<ReplicateData> replicates;
};

std::vector<std::string> data_lines(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  if (lines.empty())
    throw std::runtime_error("no rows in " + path.string());
  return lines;
}

RunData load_run(const fs::path& dir) {
  ExperimentConfig cfg = read_manifest(dir);
  RunData run;
  run.label = dir.filename().string();
  if (run.label.empty()) run.label = dir.parent_path().filename().string();
  run.substrate = cfg.substrate;

  fs::path summary_path = dir / "analysis_summary.csv";
  if (!fs::exists(summary_path))
    throw std::runtime_error(dir.string() +
                             " has no analysis_summary.csv; run analyze "
                             "before report");
  auto summary_lines = data_lines(summary_path);
  for (std::size_t i = 1; i < summary_lines.size(); ++i) {
    auto f = split_csv_line(summary_lines[i]);
    if (f.size() != 7)
      throw std::runtime_error("bad row in " + summary_path.string());
    ReplicateData rep;
    rep.replicate = static_cast<int>(parse_i64(f[0]));
    rep.final_n_correct = static_cast<int>(parse_i64(f[1]));
    rep.r = parse_double(f[3]);
    rep.s_n = parse_double(f[4]);
    rep.s_c = parse_double(f[5]);
    rep.perfect = parse_i64(f[6]) != 0;
    run.replicates.push_back(rep);
  }

  for (ReplicateData& rep : run.replicates) {
    fs::path rd = replicate_dir(dir, rep.replicate);
    rep.lod = io::read_lod_csv(rd / "lod.csv");
    {
      std::ifstream ms(rd / "rep_matrix.csv");
      if (!ms)
        throw std::runtime_error("cannot read rep_matrix.csv in " +
                                 rd.string());
      rep.m = info::read_matrix_csv(ms);
    }
    auto analysis_lines = data_lines(rd / "analysis.csv");
    for (std::size_t i = 1; i < analysis_lines.size(); ++i) {
      auto f = split_csv_line(analysis_lines[i]);
      if (f.size() != 6)
        throw std::runtime_error("bad row in analysis.csv in " + rd.string());
      rep.r_samples.emplace_back(parse_i64(f[0]), parse_double(f[3]));
    }
    fs::path rob = rd / "robustness.csv";
    if (fs::exists(rob)) {
      auto rob_lines = data_lines(rob);
      for (std::size_t i = 1; i < rob_lines.size(); ++i) {
        auto f = split_csv_line(rob_lines[i]);
        if (f.size() != 3)
          throw std::runtime_error("bad row in robustness.csv in " +
                                   rd.string());
        rep.curve.emplace_back(parse_double(f[0]), parse_double(f[1]));
      }
      double sum = 0.0;
      for (const auto& [p, mean] : rep.curve) sum += mean;
      rep.robustness = sum / static_cast<double>(rep.curve.size());
      rep.has_robustness = true;
    }
  }
  return run;
}

struct MeanVar {
  double mean = 0.0;
  double sd = 0.0;
  double stderr_of_mean = 0.0;
  std::size_t n = 0;
};

MeanVar mean_var(const std::vector<double>& xs) {
  MeanVar mv;
  mv.n = xs.size();
  if (xs.empty()) return mv;
  for (double x : xs) mv.mean += x;
  mv.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double var = 0.0;
    for (double x : xs) var += (x - mv.mean) * (x - mv.mean);
    var /= static_cast<double>(xs.size() - 1);
    mv.sd = std::sqrt(var);
    mv.stderr_of_mean = mv.sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return mv;
}

const char* substrate_order[3] = {"markov", "lstm", "rnn"};

std::ofstream open_report(const fs::path& out_dir, const char* name,
                          const std::string& runs_ref) {
  std::ofstream os(out_dir / name);
  if (!os)
    throw std::runtime_error("cannot write " + (out_dir / name).string());
  os << "# runs: " << runs_ref << '\n';
  return os;
}

}  // namespace

void cmd_report(const std::vector<fs::path>& run_dirs,
                const fs::path& out_dir) {
  if (run_dirs.empty())
    throw std::invalid_argument("report needs at least one run directory");
  fs::create_directories(out_dir);

  std::vector<RunData> runs;
  runs.reserve(run_dirs.size());
  for (const fs::path& dir : run_dirs) runs.push_back(load_run(dir));

  std::string runs_ref;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i) runs_ref += ',';
    runs_ref += runs[i].label;
  }

  // Substrates in fixed order, preserving run order within each.
  auto runs_of = [&](const char* name) {
    std::vector<const RunData*> out;
    for (const RunData& run : runs)
      if (evo::to_string(run.substrate) == name) out.push_back(&run);
    return out;
  };

  {  // (a) mean LOD fitness per generation
    auto os = open_report(out_dir, "fitness_over_generations.csv", runs_ref);
    os << "substrate,generation,n,mean_fitness,sd_fitness\n";
    for (const char* name : substrate_order) {
      auto group = runs_of(name);
      if (group.empty()) continue;
      std::size_t max_len = 0;
      for (const RunData* run : group)
        for (const ReplicateData& rep : run->replicates)
          max_len = std::max(max_len, rep.lod.size());
      for (std::size_t g = 0; g < max_len; ++g) {
        std::vector<double> xs;
        for (const RunData* run : group)
          for (const ReplicateData& rep : run->replicates)
            if (g < rep.lod.size()) xs.push_back(rep.lod[g].fitness);
        MeanVar mv = mean_var(xs);
        os << name << ',' << g << ',' << mv.n << ',' << fmt_double(mv.mean)
           << ',' << fmt_double(mv.sd) << '\n';
      }
    }
  }

  {  // (b) mean R per sampled generation, perfect performers only
    auto os = open_report(out_dir, "r_over_generations.csv", runs_ref);
    os << "substrate,generation,n,mean_R\n";
    for (const char* name : substrate_order) {
      auto group = runs_of(name);
      if (group.empty()) continue;
      std::map<std::int64_t, std::vector<double>> by_gen;
      for (const RunData* run : group)
        for (const ReplicateData& rep : run->replicates)
          if (rep.perfect)
            for (const auto& [g, r] : rep.r_samples) by_gen[g].push_back(r);
      if (by_gen.empty()) {
        os << "# empty-group: " << name << " cohort=perfect\n";
        continue;
      }
      for (const auto& [g, xs] : by_gen) {
        MeanVar mv = mean_var(xs);
        os << name << ',' << g << ',' << mv.n << ',' << fmt_double(mv.mean)
           << '\n';
      }
    }
  }

  {  // (c) linearized representation matrices, concept order size,
     // direction, location
    auto os = open_report(out_dir, "m_vectors.csv", runs_ref);
    os << "substrate,run,replicate,perfect";
    const int row_order[3] = {info::kSize, info::kDirection, info::kLocation};
    const char* row_names[3] = {"size", "direction", "location"};
    for (int r = 0; r < 3; ++r)
      for (int i = 0; i < 10; ++i) os << ',' << row_names[r] << "_n" << i;
    os << '\n';
    for (const char* name : substrate_order) {
      for (const RunData* run : runs_of(name)) {
        for (const ReplicateData& rep : run->replicates) {
          os << name << ',' << run->label << ',' << rep.replicate << ','
             << (rep.perfect ? 1 : 0);
          for (int r = 0; r < 3; ++r)
            for (int i = 0; i < 10; ++i)
              os << ',' << fmt_double(rep.m(row_order[r], i));
          os << '\n';
        }
      }
    }
  }

  {  // (d) smearedness means per substrate, perfect and all cohorts
    auto os = open_report(out_dir, "smearedness.csv", runs_ref);
    os << "substrate,cohort,n,mean_s_n,stderr_s_n,mean_s_c,stderr_s_c\n";
    for (const char* name : substrate_order) {
      auto group = runs_of(name);
      if (group.empty()) continue;
      for (bool perfect_only : {true, false}) {
        std::vector<double> sn, sc;
        for (const RunData* run : group)
          for (const ReplicateData& rep : run->replicates) {
            if (perfect_only && !rep.perfect) continue;
            sn.push_back(rep.s_n);
            sc.push_back(rep.s_c);
          }
        const char* cohort = perfect_only ? "perfect" : "all";
        if (sn.empty()) {
          os << "# empty-group: " << name << " cohort=" << cohort << '\n';
          continue;
        }
        MeanVar mn = mean_var(sn);
        MeanVar mc = mean_var(sc);
        os << name << ',' << cohort << ',' << mn.n << ','
           << fmt_double(mn.mean) << ',' << fmt_double(mn.stderr_of_mean)
           << ',' << fmt_double(mc.mean) << ','
           << fmt_double(mc.stderr_of_mean) << '\n';
      }
    }
  }

  {  // (e) robustness curves per substrate
    auto os = open_report(out_dir, "robustness_curves.csv", runs_ref);
    os << "substrate,cohort,p,n,mean,stderr\n";
    for (const char* name : substrate_order) {
      auto group = runs_of(name);
      if (group.empty()) continue;
      for (bool perfect_only : {true, false}) {
        std::map<double, std::vector<double>> by_p;
        for (const RunData* run : group)
          for (const ReplicateData& rep : run->replicates) {
            if (!rep.has_robustness) continue;
            if (perfect_only && !rep.perfect) continue;
            for (const auto& [p, mean] : rep.curve) by_p[p].push_back(mean);
          }
        const char* cohort = perfect_only ? "perfect" : "all";
        if (by_p.empty()) {
          os << "# empty-group: " << name << " cohort=" << cohort << '\n';
          continue;
        }
        for (const auto& [p, xs] : by_p) {
          MeanVar mv = mean_var(xs);
          os << name << ',' << cohort << ',' << fmt_double(p) << ',' << mv.n
             << ',' << fmt_double(mv.mean) << ','
             << fmt_double(mv.stderr_of_mean) << '\n';
        }
      }
    }
  }

  {  // (f) per-brain robustness vs smearedness, plus the regression lines
     // through substrate means
    auto os =
        open_report(out_dir, "smearedness_vs_robustness.csv", runs_ref);
    os << "substrate,run,replicate,perfect,robustness,s_n,s_c\n";
    for (const char* name : substrate_order)
      for (const RunData* run : runs_of(name))
        for (const ReplicateData& rep : run->replicates) {
          if (!rep.has_robustness) continue;
          os << name << ',' << run->label << ',' << rep.replicate << ','
             << (rep.perfect ? 1 : 0) << ',' << fmt_double(rep.robustness)
             << ',' << fmt_double(rep.s_n) << ',' << fmt_double(rep.s_c)
             << '\n';
        }

    auto ros = open_report(out_dir, "regression.csv", runs_ref);
    ros << "metric,cohort,n_substrates,slope,intercept\n";
    for (const char* metric : {"s_n", "s_c"}) {
      for (bool perfect_only : {true, false}) {
        std::vector<double> xs, ys;
        for (const char* name : substrate_order) {
          std::vector<double> rob, val;
          for (const RunData* run : runs_of(name))
            for (const ReplicateData& rep : run->replicates) {
              if (!rep.has_robustness) continue;
              if (perfect_only && !rep.perfect) continue;
              rob.push_back(rep.robustness);
              val.push_back(std::string(metric) == "s_n" ? rep.s_n
                                                         : rep.s_c);
            }
          if (rob.empty()) continue;
          xs.push_back(mean_var(rob).mean);
          ys.push_back(mean_var(val).mean);
        }
        const char* cohort = perfect_only ? "perfect" : "all";
        if (xs.size() < 2) {
          ros << "# empty-group: metric=" << metric << " cohort=" << cohort
              << '\n';
          continue;
        }
        LinearFit fit = linear_fit(xs, ys);
        ros << metric << ',' << cohort << ',' << xs.size() << ','
            << fmt_double(fit.slope) << ',' << fmt_double(fit.intercept)
            << '\n';
      }
    }
  }
}

}  // namespace acplab::experiment
