// multitrack command-line driver.
//
//   multitrack generate --config run.cfg --campaign out.txt
//   multitrack optimize --campaign c.txt --config run.cfg --out results/
//   multitrack evaluate --campaign c.txt --elements elements.csv
//   multitrack assign   --matrix costs.txt
//
// Exit codes: 0 success, 1 run failed, 2 usage, 3 config, 4 input, 5 I/O,
// 6 internal.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "multitrack/multitrack.hpp"

namespace fs = std::filesystem;
using namespace multitrack;

namespace {

enum Exit : int { kOk = 0, kFailed = 1, kUsage = 2, kConfig = 3, kInput = 4, kIo = 5, kInternal = 6 };

RunConfig read_config(const std::string& path) {
  if(path.empty()) return run_config_from(KeyValueConfig {});
  if(!fs::exists(path)) throw FileError("config file '" + path + "' does not exist");
  return load_run_config(path);
}

LabeledObservationSet read_campaign_file(const std::string& path) {
  if(!fs::exists(path)) throw FileError("campaign file '" + path + "' does not exist");
  return load_campaign(path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if(ec) throw FileError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

// ----------------------------------------------------------------------------
// generate
// ----------------------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::string campaign;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateArgs& args) {
  RunConfig rc = read_config(args.config);
  if(args.seed) rc.scenario.seed = *args.seed;
  const auto set = generate(rc.scenario);

  std::string path = args.campaign;
  if(path.empty()) {
    const std::string dir = args.out.empty() ? rc.out_dir : args.out;
    ensure_dir(dir);
    path = join(dir, "campaign.txt");
  }
  save_campaign(path, set);

  const auto& obs = set.observations;
  std::printf("wrote %s\n", path.c_str());
  std::printf("dates %zu  objects %zu  min elevation %.3f deg\n", obs.date_count(),
              set.truth.size(), rad2deg(min_truth_elevation(rc.scenario)));
  std::printf("batch sizes:");
  for(const auto& b : obs.batches) std::printf(" %zu", b.size());
  std::printf("\n");
  return kOk;
}

// ----------------------------------------------------------------------------
// optimize
// ----------------------------------------------------------------------------

struct OptimizeArgs {
  std::string campaign;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool warm_start_truth {false};
  bool quiet {false};
};

Table residual_table(const FitnessReport& report, const ObservationSet& obs) {
  Table t;
  t.header = {"date", "epoch_s", "night"};
  const std::size_t n = report.final_residuals().size();
  for(std::size_t i = 0; i < n; ++i) t.header.push_back("R_" + std::to_string(i + 1));
  for(std::size_t j = 0; j < obs.date_count(); ++j) {
    std::vector<double> row {static_cast<double>(j + 1), obs.dates[j],
                             static_cast<double>(obs.nights[j])};
    row.insert(row.end(), report.residuals[j].begin(), report.residuals[j].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

// One row per (date, object): the measurement row it explains and at what cost.
// Rows are 1-based in campaign file order; label 0 marks a fictitious row.
Table assignment_table(const Candidate& c, const FitnessReport& report,
                       const LabeledObservationSet& set) {
  const ObservationSet& obs = set.observations;
  const bool labeled = !set.labels.empty();
  Table t;
  t.header = {"date", "epoch_s", "object", "row", "cost"};
  if(labeled) t.header.push_back("label");
  for(std::size_t j = 0; j < obs.date_count(); ++j) {
    const auto predicted = pseudo_measurements(c, obs, j);
    const CostMatrix C = build_cost_matrix(predicted, obs.batches[j], obs.sigmas[j], j);
    const auto& row_of = report.assignments[j].row_of;
    for(std::size_t i = 0; i < row_of.size(); ++i) {
      std::vector<double> row {static_cast<double>(j + 1), obs.dates[j], static_cast<double>(i + 1),
                               static_cast<double>(row_of[i] + 1), C(row_of[i], i)};
      if(labeled) row.push_back(static_cast<double>(set.labels[j][row_of[i]] + 1));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

int cmd_optimize(const OptimizeArgs& args) {
  RunConfig rc = read_config(args.config);
  if(args.seed) rc.swarm.seed = *args.seed;
  if(args.workers) {
    if(*args.workers < 1) throw ConfigError("--workers: must be >= 1");
    rc.swarm.workers = *args.workers;
  }
  const std::string out_dir = args.out.empty() ? rc.out_dir : args.out;

  const auto set = read_campaign_file(args.campaign);
  const ObservationSet& obs = set.observations;
  obs.validate();

  const std::size_t n = rc.objects ? rc.objects : obs.min_batch_size();
  std::optional<Candidate> warm;
  if(args.warm_start_truth) {
    if(set.truth.size() != n) {
      throw std::invalid_argument("--warm-start-truth: campaign truth has " +
                                  std::to_string(set.truth.size()) + " objects, run uses " +
                                  std::to_string(n));
    }
    warm = set.truth;
  }

  ProgressCallback progress;
  const std::size_t every = std::max<std::size_t>(1, rc.swarm.iterations / 10);
  if(!args.quiet) {
    progress = [every](const TraceRow& row) {
      if(row.iteration % every == 0) {
        std::printf("iter %5zu  best %-14.6g mean %-14.6g evals %zu\n", row.iteration,
                    row.best_fitness, row.mean_fitness, row.evaluations);
        std::fflush(stdout);
      }
    };
  }

  const Reconstruction r = reconstruct(obs, rc.bounds(n), rc.swarm, n, progress, warm);

  ensure_dir(out_dir);
  save_table(join(out_dir, "elements.csv"), elements_table(r.best));

  Table trace;
  trace.header = {"iteration", "best_fitness", "mean_fitness", "evaluations"};
  for(const auto& row : r.swarm.trace) {
    trace.rows.push_back({static_cast<double>(row.iteration), row.best_fitness, row.mean_fitness,
                          static_cast<double>(row.evaluations)});
  }
  save_table(join(out_dir, "convergence.csv"), trace);
  save_table(join(out_dir, "residuals.csv"), residual_table(r.report, obs));
  save_table(join(out_dir, "assignments.csv"), assignment_table(r.best, r.report, set));

  std::printf("objects %zu  F = %.10g  evaluations %zu\n", n, r.report.fitness, r.swarm.evaluations);
  if(!set.labels.empty() && !set.truth.elements.empty()) {
    const auto score = score_assignments(r.report, set.labels, set.truth.size());
    Table s;
    s.header = {"fitness", "purity", "consistency"};
    s.rows.push_back({r.report.fitness, score.purity, score.consistency});
    save_table(join(out_dir, "scores.csv"), s);
    std::printf("purity %.4f  consistency %.4f\n", score.purity, score.consistency);
  }
  std::printf("results in %s\n", out_dir.c_str());
  return kOk;
}

// ----------------------------------------------------------------------------
// evaluate
// ----------------------------------------------------------------------------

int cmd_evaluate(const std::string& campaign, const std::string& elements) {
  const auto set = read_campaign_file(campaign);
  if(!fs::exists(elements)) throw FileError("elements file '" + elements + "' does not exist");
  const Candidate c = candidate_from_table(load_table(elements), elements);
  set.observations.validate();
  const FitnessReport report = evaluate(c, set.observations);

  double sum_k = 0.0, sum_r = 0.0;
  for(double k : report.per_date_costs) sum_k += k;
  for(double r : report.final_residuals()) sum_r += r;

  std::printf("F %s\n", format_number(report.fitness).c_str());
  std::printf("K");
  for(double k : report.per_date_costs) std::printf(" %s", format_number(k).c_str());
  std::printf("\nR");
  for(double r : report.final_residuals()) std::printf(" %s", format_number(r).c_str());
  std::printf("\nsum_K %s  sum_R %s\n", format_number(sum_k).c_str(), format_number(sum_r).c_str());
  if(!set.labels.empty() && set.truth.size() >= c.size()) {
    const auto score = score_assignments(report, set.labels, set.truth.size());
    std::printf("purity %.4f  consistency %.4f\n", score.purity, score.consistency);
  }
  return kOk;
}

// ----------------------------------------------------------------------------
// assign
// ----------------------------------------------------------------------------

int cmd_assign(const std::string& path) {
  if(!fs::exists(path)) throw FileError("matrix file '" + path + "' does not exist");
  auto in = detail::open_in(path);
  const CostMatrix C = read_matrix(in, path);
  C.validate();
  const Assignment a = solve(C);
  std::printf("object row cost\n");
  for(std::size_t i = 0; i < a.row_of.size(); ++i) {
    std::printf("%zu %zu %s\n", i, a.row_of[i], format_number(C(a.row_of[i], i)).c_str());
  }
  std::printf("total %s\n", format_number(a.total_cost).c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app {"Multi-object trajectory reconstruction from angles-only photographs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic observation campaign");
  g->add_option("--config", gen.config, "Run configuration (key = value)");
  g->add_option("--campaign", gen.campaign, "Campaign file to write");
  g->add_option("--out", gen.out, "Output directory (campaign.txt) when --campaign is absent");
  g->add_option("--seed", gen.seed, "Scenario seed");

  OptimizeArgs opt;
  auto* o = app.add_subcommand("optimize", "Reconstruct initial conditions from a campaign");
  o->add_option("--campaign", opt.campaign, "Campaign file")->required();
  o->add_option("--config", opt.config, "Run configuration (key = value)");
  o->add_option("--out", opt.out, "Output directory");
  o->add_option("--seed", opt.seed, "Swarm seed");
  o->add_option("--workers", opt.workers, "Evaluation threads");
  o->add_flag("--warm-start-truth", opt.warm_start_truth, "Seed one particle with the campaign truth");
  o->add_flag("--quiet", opt.quiet, "No progress lines");

  std::string ev_campaign, ev_elements;
  auto* e = app.add_subcommand("evaluate", "Fitness report of an element table");
  e->add_option("--campaign", ev_campaign, "Campaign file")->required();
  e->add_option("--elements", ev_elements, "Elements CSV")->required();

  std::string matrix;
  auto* a = app.add_subcommand("assign", "Solve one assignment problem");
  a->add_option("--matrix,matrix", matrix, "Whitespace-separated cost matrix (rows = measurements)")
      ->required();

  try {
    app.parse(argc, argv);
  }
  catch(const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if(*g) return cmd_generate(gen);
    if(*o) return cmd_optimize(opt);
    if(*e) return cmd_evaluate(ev_campaign, ev_elements);
    if(*a) return cmd_assign(matrix);
  }
  catch(const ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return kConfig;
  }
  catch(const ParseError& ex) {
    std::fprintf(stderr, "parse error: %s\n", ex.what());
    return kInput;
  }
  catch(const FileError& ex) {
    std::fprintf(stderr, "i/o error: %s\n", ex.what());
    return kIo;
  }
  catch(const std::invalid_argument& ex) {
    std::fprintf(stderr, "invalid input: %s\n", ex.what());
    return kInput;
  }
  catch(const std::logic_error& ex) {
    std::fprintf(stderr, "internal error: %s\n", ex.what());
    return kInternal;
  }
  catch(const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kFailed;
  }
  return kUsage;
}
