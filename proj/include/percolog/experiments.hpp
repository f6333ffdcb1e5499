#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "percolog/configuration.hpp"
#include "percolog/io.hpp"
#include "percolog/stats.hpp"

namespace percolog {

struct TriLattice;

// Sampling-side statistics violation (too few samples for the requested
// batching); distinct from config errors so the CLI can map exit codes.
struct StatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A fully bound experiment: lattice, tally keys, and a kernel factory. Each
// worker thread calls make_kernel() once and owns the returned closure's
// scratch state; the closure folds one configuration into the tally row.
struct ExperimentPlan {
  std::shared_ptr<const TriLattice> lat;
  std::vector<std::string> keys;
  std::function<std::function<void(const Configuration&, uint64_t*)>()> make_kernel;
};

// Validates cfg.params and binds the plan for any sampling kind. "calibrate"
// delegates to the kind named in params.target_kind; "oracle-suite" is not a
// sampling kind and is rejected here.
ExperimentPlan build_plan(const ExperimentConfig& cfg);

// Deterministic parallel runner: [index_offset, index_offset + samples) is
// split into `batches` contiguous ranges (batch_range), threads pull batch
// indices from an atomic counter, and every batch's tallies depend only on
// (seed, range), so the result is identical for any worker count.
EventCounts run_plan(const ExperimentPlan& plan, uint64_t seed, uint64_t index_offset,
                     uint64_t samples, uint64_t batches, int workers);

// Pure report: estimates, fits, and reference values derived from (cfg, ec).
json report_plan(const ExperimentConfig& cfg, const EventCounts& ec);

// Writes counts.json, report.json, the per-kind CSV tables, and
// manifest.json into outdir. file_config is echoed verbatim into
// counts.json so reruns with overridden worker counts stay byte-identical.
// Returns the file names written.
std::vector<std::string> emit_outputs(const ExperimentConfig& cfg, const json& file_config,
                                      const EventCounts& ec, const std::string& outdir);

// Fixed battery of exact-enumeration and closed-form oracles re-checked by
// Monte Carlo at pinned seeds; each line carries a z-score. all_within(3)
// is the headline result.
struct OracleLine {
  std::string name;
  double exact = 0.0;
  double estimate = 0.0;
  double sigma = 0.0;
  double z = 0.0;  // |estimate - exact| / sigma (0 for identities that must hold exactly)
  bool pass = false;
};
std::vector<OracleLine> run_oracle_suite();
json oracle_report(const std::vector<OracleLine>& lines);

}  // namespace percolog
