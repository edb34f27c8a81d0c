#include "cluspt/campaign.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "cluspt/error.hpp"
#include "cluspt/instance_io.hpp"
#include "cluspt/metrics.hpp"
#include "cluspt/mfea.hpp"

namespace cluspt {

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kGacspt:
      return "GACSPT";
    case Algorithm::kNlsea:
      return "N-LSEA";
    case Algorithm::kMlsea:
      return "M-LSEA";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "GACSPT" || s == "gacspt") return Algorithm::kGacspt;
  if (s == "N-LSEA" || s == "nlsea") return Algorithm::kNlsea;
  if (s == "M-LSEA" || s == "mlsea") return Algorithm::kMlsea;
  throw InvalidParameters("unknown algorithm '" + std::string(s) + "'");
}

SolveOutcome solve(const ClusteredInstance& inst, Algorithm algo, const SolverConfig& cfg,
                   std::uint64_t seed) {
  SolveOutcome out;
  if (algo == Algorithm::kGacspt) {
    GaConfig ga = cfg.ga;
    ga.seed = seed;
    RunResult r = run_gacspt(inst, ga);
    out.solution = std::move(r.solution);
    out.trace = std::move(r.trace);
    return out;
  }
  LowerConfig lower = cfg.lower;
  lower.seed = seed;
  BilevelResult r = algo == Algorithm::kNlsea ? run_nlsea(inst, lower) : run_mlsea(inst, lower);
  out.solution = std::move(r.solution);
  out.trace = std::move(r.trace);
  return out;
}

// ---------------------------------------------------------------------------
// Records

namespace {

std::string join_trace(const std::vector<double>& trace) {
  std::string s;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) s += ';';
    s += format_real(trace[i]);
  }
  return s;
}

std::vector<double> split_trace(std::string_view s) {
  std::vector<double> out;
  while (!s.empty()) {
    const std::size_t end = s.find(';');
    const std::string_view item = s.substr(0, end);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw ParseError("bad trace value '" + std::string(item) + "'", 0, 0);
    out.push_back(v);
    if (end == std::string_view::npos) break;
    s.remove_prefix(end + 1);
  }
  return out;
}

}  // namespace

std::string to_record_line(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["instance"] = r.instance;
  j["algo"] = algorithm_name(r.algorithm);
  j["seed"] = r.seed;
  j["best_cost"] = r.best_cost;
  j["minutes"] = r.minutes;
  j["evals"] = r.evaluations;
  j["trace"] = join_trace(r.trace);
  if (!r.error.empty()) j["error"] = r.error;
  return j.dump();
}

RunRecord parse_record_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("bad record: ") + e.what(), 0, e.byte);
  }
  RunRecord r;
  try {
    r.instance = j.at("instance").get<std::string>();
    r.algorithm = parse_algorithm(j.at("algo").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.best_cost = j.at("best_cost").get<double>();
    r.minutes = j.at("minutes").get<double>();
    r.evaluations = j.at("evals").get<std::size_t>();
    r.trace = split_trace(j.at("trace").get<std::string>());
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad record field: ") + e.what(), 0, 0);
  } catch (const InvalidParameters& e) {
    throw ParseError(e.what(), 0, 0);
  }
  return r;
}

void write_records(std::ostream& out, const std::vector<RunRecord>& records) {
  for (const auto& r : records) out << to_record_line(r) << '\n';
}

std::vector<RunRecord> read_records(std::istream& in) {
  std::vector<RunRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_record_line(line));
    } catch (const ParseError& e) {
      throw ParseError(e.message(), number, e.column());
    }
  }
  return out;
}

std::vector<RunRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_records(in);
}

// ---------------------------------------------------------------------------
// Summaries

Baseline parse_baseline(std::istream& in) {
  Baseline b;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string name;
    if (!(ss >> name)) continue;
    double best = 0.0;
    std::string extra;
    if (!(ss >> best) || (ss >> extra)) throw ParseError("expected '<instance> <best>'", number, 1);
    b[name] = best;
  }
  return b;
}

Baseline load_baseline(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_baseline(in);
}

CampaignSummary summarize(const std::vector<RunRecord>& records, const Baseline* baseline) {
  using Key = std::pair<std::string, Algorithm>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const auto& r : records)
    if (r.error.empty()) groups[{r.instance, r.algorithm}].push_back(&r);

  CampaignSummary s;
  std::map<std::string, std::map<Algorithm, const SummaryRow*>> by_instance;
  s.rows.reserve(groups.size());
  for (auto& [key, runs] : groups) {
    // Seed order makes the floating-point sums independent of record order.
    std::sort(runs.begin(), runs.end(),
              [](const RunRecord* a, const RunRecord* b) { return a->seed < b->seed; });
    std::vector<double> costs;
    double minutes = 0.0;
    for (const RunRecord* r : runs) {
      costs.push_back(r->best_cost);
      minutes += r->minutes;
    }
    const SampleSummary ss = summarize_sample(costs);
    SummaryRow row;
    row.instance = key.first;
    row.algorithm = key.second;
    row.runs = runs.size();
    row.bf = ss.min;
    row.avg = ss.mean;
    row.cv = ss.cv;
    row.rm = minutes / static_cast<double>(runs.size());
    if (baseline) {
      if (auto it = baseline->find(row.instance); it != baseline->end())
        row.rpd = rpd(row.avg, it->second);
    }
    s.rows.push_back(std::move(row));
  }
  for (const auto& row : s.rows) by_instance[row.instance][row.algorithm] = &row;

  for (const auto& [instance, algos] : by_instance) {
    for (auto a = algos.begin(); a != algos.end(); ++a)
      for (auto b = std::next(a); b != algos.end(); ++b)
        if (a->second->bf > 0.0)
          s.pi.push_back({instance, b->first, a->first, pi_gap(b->second->bf, a->second->bf)});
    const auto m = algos.find(Algorithm::kMlsea);
    const auto n = algos.find(Algorithm::kNlsea);
    if (m != algos.end() && n != algos.end()) {
      if (m->second->avg < n->second->avg) ++s.nib;
      if (n->second->avg < m->second->avg) ++s.nab;
    }
  }
  return s;
}

std::string format_summary_csv(const CampaignSummary& s) {
  const bool with_rpd =
      std::any_of(s.rows.begin(), s.rows.end(), [](const SummaryRow& r) { return r.rpd; });
  std::ostringstream os;
  os << "instance,algo,BF,Avg,CV,Rm" << (with_rpd ? ",RPD" : "") << '\n';
  for (const auto& r : s.rows) {
    os << r.instance << ',' << algorithm_name(r.algorithm) << ',' << format_real(r.bf) << ','
       << format_real(r.avg) << ',' << format_real(r.cv) << ',' << format_real(r.rm);
    if (with_rpd) os << ',' << (r.rpd ? format_real(*r.rpd) : "");
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Campaign runner

CampaignResult run_campaign(const std::vector<CampaignInstance>& instances,
                            const CampaignOptions& options) {
  const std::size_t per_instance = options.algorithms.size() * options.runs;
  const std::size_t cells = instances.size() * per_instance;

  // Parallelism lives at the cell level; each cell runs its kernels serially.
  SolverConfig config = options.config;
  if (options.execution == Execution::kParallel) {
    config.ga.execution = Execution::kSerial;
    config.lower.execution = Execution::kSerial;
  }

  CampaignResult result;
  result.records.resize(cells);
  parallel_for(cells, options.execution, [&](std::size_t cell) {
    const CampaignInstance& ci = instances[cell / per_instance];
    const std::size_t rest = cell % per_instance;
    const Algorithm algo = options.algorithms[rest / options.runs];
    const std::uint64_t seed = options.base_seed + rest % options.runs;

    RunRecord& rec = result.records[cell];
    rec.instance = ci.name;
    rec.algorithm = algo;
    rec.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
      const SolveOutcome out = solve(*ci.instance, algo, config, seed);
      rec.best_cost = out.solution.cost;
      rec.evaluations = out.trace.evaluations;
      rec.trace = out.trace.best;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    if (options.record_time)
      rec.minutes =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  });

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const RunRecord& a, const RunRecord& b) {
                     return std::tie(a.instance, a.algorithm, a.seed) <
                            std::tie(b.instance, b.algorithm, b.seed);
                   });
  result.summary = summarize(result.records);
  return result;
}

// ---------------------------------------------------------------------------
// Convergence

std::vector<ConvergenceCurve> convergence_curves(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, Algorithm>, std::vector<std::vector<double>>> groups;
  for (const auto& r : records) {
    if (!r.error.empty() || r.trace.empty()) continue;
    auto& g = groups[{r.instance, r.algorithm}];
    if (r.trace.size() < 2)
      g.push_back({0.0});
    else
      g.push_back(normalize_trace(r.trace));
  }
  std::vector<ConvergenceCurve> curves;
  for (const auto& [key, traces] : groups)
    curves.push_back({key.first, key.second, average_traces(traces)});
  return curves;
}

std::string format_convergence_csv(const std::vector<ConvergenceCurve>& curves) {
  std::ostringstream os;
  os << "instance,algo,step,value\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.values.size(); ++i)
      os << c.instance << ',' << algorithm_name(c.algorithm) << ',' << i << ','
         << format_real(c.values[i]) << '\n';
  return os.str();
}

std::string format_solution(const CluSolution& s) {
  std::ostringstream os;
  os << "# cost = " << format_real(s.cost) << '\n';
  const RootedTree& t = s.tree;
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (t.parent[v] == RootedTree::kNoParent) continue;
    os << t.parent_vertex(v) + 1 << ' ' << t.vertex[v] + 1 << ' ' << format_real(t.parent_weight[v])
       << '\n';
  }
  return os.str();
}

}  // namespace cluspt
