// Command-line front end: solve, bench, stats, convergence, generate.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cluspt/campaign.hpp"
#include "cluspt/error.hpp"
#include "cluspt/instance_io.hpp"
#include "cluspt/metrics.hpp"
#include "cluspt/stats.hpp"

namespace fs = std::filesystem;
using namespace cluspt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;

struct Tuning {
  std::size_t pop = 0;
  std::size_t gens = 0;
  std::size_t budget = 0;
  std::size_t patience = 0;
  double rmp = -1.0;
  double mut = -1.0;
  bool serial = false;
};

void add_tuning(CLI::App* cmd, Tuning& t) {
  cmd->add_option("--pop", t.pop, "Population size (GACSPT default 200, lower level 20)");
  cmd->add_option("--gens", t.gens, "GACSPT generation limit (default 6000)");
  cmd->add_option("--patience", t.patience, "GACSPT stall limit in generations (default 500)");
  cmd->add_option("--budget", t.budget, "Lower-level evaluations per solve (default 1200)");
  cmd->add_option("--rmp", t.rmp, "M-LSEA random mating probability (default 0.9)");
  cmd->add_option("--mut", t.mut, "Mutation rate (default 0.1)");
  cmd->add_flag("--serial", t.serial, "Disable OpenMP kernels");
}

SolverConfig make_config(const Tuning& t) {
  SolverConfig cfg;
  if (t.pop) {
    cfg.ga.pop_size = t.pop;
    cfg.lower.pop_size = t.pop;
  }
  if (t.gens) cfg.ga.max_generations = t.gens;
  if (t.patience) cfg.ga.convergence_patience = t.patience;
  if (t.budget) cfg.lower.eval_budget = t.budget;
  if (t.rmp >= 0.0) cfg.lower.rmp = t.rmp;
  if (t.mut >= 0.0) {
    cfg.ga.mutation_rate = t.mut;
    cfg.lower.mutation_rate = t.mut;
  }
  const Execution exec = t.serial ? Execution::kSerial : Execution::kParallel;
  cfg.ga.execution = exec;
  cfg.lower.execution = exec;
  cfg.ga.validate();
  cfg.lower.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

std::vector<Algorithm> parse_algorithms(const std::string& list) {
  std::vector<Algorithm> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_algorithm(item));
  if (out.empty()) throw InvalidParameters("no algorithms given");
  return out;
}

int cmd_solve(const std::string& instance_path, const std::string& algo, std::uint64_t seed,
              const Tuning& tuning, const std::string& out_path) {
  const ClusteredInstance inst = load_instance(instance_path);
  const SolverConfig cfg = make_config(tuning);
  const SolveOutcome out = solve(inst, parse_algorithm(algo), cfg, seed);
  const std::string text = format_solution(out.solution);
  std::cout << inst.name() << ' ' << algorithm_name(parse_algorithm(algo)) << " cost "
            << format_real(out.solution.cost) << " evals " << out.trace.evaluations << '\n';
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return kExitOk;
}

int cmd_bench(const std::string& dir, const std::string& algos, std::size_t runs,
              std::uint64_t seed, const Tuning& tuning, const std::string& out_dir,
              bool record_time, const std::string& baseline_path) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("no instance files in " + dir);

  std::vector<ClusteredInstance> instances;
  instances.reserve(files.size());
  for (const auto& f : files) {
    try {
      instances.push_back(load_instance(f));
    } catch (const Error& e) {
      std::cerr << f.string() << ": " << e.what() << '\n';
      throw;
    }
  }
  std::vector<CampaignInstance> list;
  for (const auto& inst : instances) list.push_back({inst.name(), &inst});

  CampaignOptions options;
  options.algorithms = parse_algorithms(algos);
  options.runs = runs;
  options.base_seed = seed;
  options.config = make_config(tuning);
  options.record_time = record_time;
  options.execution = tuning.serial ? Execution::kSerial : Execution::kParallel;
  const CampaignResult result = run_campaign(list, options);

  std::ostringstream records;
  write_records(records, result.records);
  write_file(fs::path(out_dir) / "records.jsonl", records.str());

  CampaignSummary summary = result.summary;
  if (!baseline_path.empty()) {
    const Baseline baseline = load_baseline(baseline_path);
    summary = summarize(result.records, &baseline);
  }
  write_file(fs::path(out_dir) / "summary.csv", format_summary_csv(summary));

  std::size_t failed = 0;
  for (const auto& r : result.records) {
    if (r.error.empty()) continue;
    ++failed;
    std::cerr << r.instance << ' ' << algorithm_name(r.algorithm) << " seed " << r.seed << ": "
              << r.error << '\n';
  }
  std::cout << result.records.size() << " runs, " << failed << " failed\n";
  std::cout << format_summary_csv(summary);
  return kExitOk;
}

int cmd_stats(const std::string& records_path, const std::string& baseline_path,
              const std::string& out_path) {
  const auto records = load_records(records_path);
  Baseline baseline;
  if (!baseline_path.empty()) baseline = load_baseline(baseline_path);
  const CampaignSummary summary = summarize(records, baseline_path.empty() ? nullptr : &baseline);
  const std::string csv = format_summary_csv(summary);
  std::cout << csv;
  if (!out_path.empty()) write_file(out_path, csv);

  if (!summary.pi.empty()) {
    std::cout << "\nPI on BF\ninstance,a,b,PI\n";
    for (const auto& p : summary.pi)
      std::cout << p.instance << ',' << algorithm_name(p.a) << ',' << algorithm_name(p.b) << ','
                << format_real(p.pi) << '\n';
  }
  std::cout << "\nNIB (M-LSEA better Avg) = " << summary.nib
            << ", NAB (N-LSEA better Avg) = " << summary.nab << '\n';

  // Algorithm x instance matrix of Avg, over instances every algorithm solved.
  std::vector<Algorithm> algos;
  std::map<std::string, std::map<Algorithm, double>> avg;
  for (const auto& row : summary.rows) {
    avg[row.instance][row.algorithm] = row.avg;
    if (std::find(algos.begin(), algos.end(), row.algorithm) == algos.end())
      algos.push_back(row.algorithm);
  }
  std::sort(algos.begin(), algos.end());
  stats::ResultMatrix m;
  m.algorithms = algos.size();
  for (Algorithm a : algos) m.algorithm_names.emplace_back(algorithm_name(a));
  for (const auto& [instance, cells] : avg) {
    if (cells.size() != algos.size()) continue;
    for (Algorithm a : algos) m.values.push_back(cells.at(a));
    ++m.datasets;
  }
  std::cout << '\n';
  if (m.algorithms < 2 || m.datasets < 2) {
    std::cout << "statistical tests need at least 2 algorithms on at least 2 instances\n";
    return kExitOk;
  }
  std::cout << stats::format_report(stats::friedman_suite(m), m);
  return kExitOk;
}

int cmd_convergence(const std::string& records_path, const std::string& out_path) {
  const auto records = load_records(records_path);
  const std::string csv = format_convergence_csv(convergence_curves(records));
  if (out_path.empty())
    std::cout << csv;
  else
    write_file(out_path, csv);
  return kExitOk;
}

int cmd_generate(std::size_t n, std::size_t k, const std::string& layout, std::uint64_t seed,
                 const std::string& out_path) {
  Layout l;
  if (layout == "uniform")
    l = Layout::kUniformSquare;
  else if (layout == "grid")
    l = Layout::kGridCells;
  else
    throw InvalidParameters("layout must be uniform or grid");
  const std::string text = serialize_instance(generate_instance(n, k, l, seed));
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered shortest-path tree solvers and benchmark tools"};
  app.require_subcommand(1);

  Tuning tuning;
  std::uint64_t seed = 0;
  std::string out;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  std::string instance_path;
  std::string algo = "gacspt";
  solve_cmd->add_option("instance", instance_path, "Instance file")->required();
  solve_cmd->add_option("--algo", algo, "gacspt | nlsea | mlsea")->capture_default_str();
  solve_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  solve_cmd->add_option("--out", out, "Solution file (default: stdout)");
  add_tuning(solve_cmd, tuning);

  auto* bench_cmd = app.add_subcommand("bench", "Run a seeded campaign over a directory");
  std::string dir;
  std::string algos = "gacspt,nlsea,mlsea";
  std::size_t runs = 30;
  bool record_time = false;
  std::string baseline;
  std::string out_dir = "results";
  bench_cmd->add_option("dir", dir, "Directory of instance files")->required();
  bench_cmd->add_option("--algos", algos, "Comma-separated algorithms")->capture_default_str();
  bench_cmd->add_option("--runs", runs, "Runs per instance and algorithm")->capture_default_str();
  bench_cmd->add_option("--seed", seed, "Base seed; run i uses seed + i")->capture_default_str();
  bench_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  bench_cmd->add_option("--baseline", baseline, "Baseline best costs for RPD");
  bench_cmd->add_flag("--record-time", record_time,
                      "Store wall-clock minutes (makes output time dependent)");
  add_tuning(bench_cmd, tuning);

  auto* stats_cmd = app.add_subcommand("stats", "Summarize a results file and run the tests");
  std::string records_path;
  stats_cmd->add_option("results", records_path, "records.jsonl")->required();
  stats_cmd->add_option("--baseline", baseline, "Baseline best costs for RPD");
  stats_cmd->add_option("--out", out, "Also write the summary CSV here");

  auto* conv_cmd = app.add_subcommand("convergence", "Average normalized convergence traces");
  conv_cmd->add_option("results", records_path, "records.jsonl")->required();
  conv_cmd->add_option("--out", out, "CSV output (default: stdout)");

  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic Euclidean instance");
  std::size_t n = 40;
  std::size_t k = 4;
  std::string layout = "uniform";
  gen_cmd->add_option("-n", n, "Vertices")->capture_default_str();
  gen_cmd->add_option("-k", k, "Clusters")->capture_default_str();
  gen_cmd->add_option("--layout", layout, "uniform | grid")->capture_default_str();
  gen_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out", out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*solve_cmd) return cmd_solve(instance_path, algo, seed, tuning, out);
    if (*bench_cmd)
      return cmd_bench(dir, algos, runs, seed, tuning, out_dir, record_time, baseline);
    if (*stats_cmd) return cmd_stats(records_path, baseline, out);
    if (*conv_cmd) return cmd_convergence(records_path, out);
    if (*gen_cmd) return cmd_generate(n, k, layout, seed, out);
  } catch (const InfeasibleInstance& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const InfeasibleRoots& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}
