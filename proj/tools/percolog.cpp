// Command-line front end: run sampling experiments from JSON configs, merge
// accumulator files, regenerate reports, and execute the oracle battery.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "percolog/experiments.hpp"

using namespace percolog;

namespace {

// PERCOLOG_WORKERS beats the flag, the flag beats the config file.
int effective_workers(int flag_workers, bool flag_given, int cfg_workers) {
  if (const char* env = std::getenv("PERCOLOG_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return int(v);
  }
  return flag_given ? flag_workers : cfg_workers;
}

void print_oracle_lines(const std::vector<OracleLine>& lines) {
  for (const OracleLine& l : lines)
    std::printf("%-4s %-32s exact=%-12.10g est=%-12.10g sigma=%-10.4g z=%+.3f\n",
                l.pass ? "PASS" : "FAIL", l.name.c_str(), l.exact, l.estimate, l.sigma, l.z);
}

int run_oracle(const std::string& out) {
  const std::vector<OracleLine> lines = run_oracle_suite();
  print_oracle_lines(lines);
  const json rep = oracle_report(lines);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    write_text(out + "/oracle.json", rep.dump(2) + "\n");
  }
  const bool ok = rep.at("all_pass").get<bool>();
  std::printf("%s (%zu checks)\n", ok ? "ALL PASS" : "FAILURES PRESENT", lines.size());
  return ok ? 0 : 3;
}

int cmd_run(const std::string& config_path, bool seed_given, uint64_t seed, bool workers_given,
            int workers, const std::string& out_flag) {
  json file_cfg = load_json_file(config_path);
  if (seed_given && file_cfg.is_object()) file_cfg["seed"] = seed;
  ExperimentConfig cfg = parse_config(file_cfg);
  cfg.workers = effective_workers(workers, workers_given, cfg.workers);
  if (!out_flag.empty()) cfg.out = out_flag;
  if (cfg.kind == "oracle-suite") return run_oracle(cfg.out);

  const ExperimentPlan plan = build_plan(cfg);
  const EventCounts ec =
      run_plan(plan, cfg.seed, cfg.index_offset, cfg.samples, cfg.batches, cfg.workers);
  const std::vector<std::string> files = emit_outputs(cfg, file_cfg, ec, cfg.out);
  std::printf("kind=%s samples=%llu batches=%llu hash=%s\n", cfg.kind.c_str(),
              (unsigned long long)cfg.samples, (unsigned long long)cfg.batches,
              config_hash(file_cfg).c_str());
  for (const std::string& f : files) std::printf("  %s/%s\n", cfg.out.c_str(), f.c_str());
  return 0;
}

int cmd_merge(const std::vector<std::string>& inputs, const std::string& out) {
  CountsFile acc = load_counts(inputs.front());
  for (size_t k = 1; k < inputs.size(); ++k) {
    const CountsFile next = load_counts(inputs[k]);
    merge_counts(acc, next);
  }
  std::filesystem::create_directories(out);
  save_counts(out + "/counts.json", acc.config, acc.counts);
  std::printf("merged %zu files: %llu samples, %zu batches, hash=%s\n", inputs.size(),
              (unsigned long long)acc.counts.total_samples(), acc.counts.batches.size(),
              acc.hash.c_str());
  std::printf("  %s/counts.json\n", out.c_str());
  return 0;
}

int cmd_report(const std::string& counts_path, const std::string& out) {
  const CountsFile file = load_counts(counts_path);
  const ExperimentConfig cfg = parse_config(file.config);
  const std::vector<std::string> files = emit_outputs(cfg, file.config, file.counts, out);
  std::printf("kind=%s samples=%llu hash=%s\n", cfg.kind.c_str(),
              (unsigned long long)file.counts.total_samples(), file.hash.c_str());
  for (const std::string& f : files) std::printf("  %s/%s\n", out.c_str(), f.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"percolog: critical site-percolation measurements on the triangular lattice"};
  app.require_subcommand(1);

  std::string config_path, out_run, counts_path, out_merge = "out", out_report = "out",
                           out_oracle = "out";
  std::vector<std::string> merge_inputs;
  uint64_t seed = 0;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "sample an experiment described by a JSON config");
  run->add_option("--config", config_path, "experiment config path")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override the config seed");
  CLI::Option* workers_opt =
      run->add_option("--workers", workers, "worker threads (default: hardware)");
  run->add_option("--out", out_run, "output directory (default: config's 'out')");

  CLI::App* merge = app.add_subcommand("merge", "merge accumulator files with equal config hash");
  merge->add_option("inputs", merge_inputs, "counts.json files")->required()->expected(-2);
  merge->add_option("--out", out_merge, "output directory");

  CLI::App* report = app.add_subcommand("report", "regenerate report and tables from counts");
  report->add_option("counts", counts_path, "counts.json path")->required();
  report->add_option("--out", out_report, "output directory");

  CLI::App* oracle = app.add_subcommand("oracle", "run the exact-value oracle battery");
  oracle->add_option("--out", out_oracle, "directory for oracle.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, seed_opt->count() > 0, seed, workers_opt->count() > 0, workers,
                     out_run);
    if (merge->parsed()) return cmd_merge(merge_inputs, out_merge);
    if (report->parsed()) return cmd_report(counts_path, out_report);
    return run_oracle(out_oracle);
  } catch (const StatError& e) {
    std::fprintf(stderr, "statistics error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
}
