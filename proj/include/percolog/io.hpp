#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "percolog/lattice.hpp"
#include "percolog/stats.hpp"

namespace percolog {

using json = nlohmann::json;

// throws invalid_argument naming the first key of obj not in allowed
void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where);

// Declarative experiment description. The lattice density is pinned at the
// critical point; only geometry and sampling controls are configurable.
struct ExperimentConfig {
  std::string kind;  // twopoint fourpoint boundary-fourpoint multiscale arms
                     // crossing mixed oracle-suite calibrate
  Geometry geometry = Geometry::BulkBox;
  int L = 0;
  uint64_t samples = 0;
  uint64_t seed = 0;
  uint64_t batches = 64;
  uint64_t index_offset = 0;
  int workers = 0;  // 0 = hardware concurrency
  std::string out = "out";
  json params = json::object();  // kind-specific block, validated by the plan
};

json load_json_file(const std::string& path);  // runtime_error on unreadable or bad JSON
ExperimentConfig parse_config(const json& j);  // invalid_argument on any schema violation
LatticeSpec lattice_spec(const ExperimentConfig& cfg);

uint64_t fnv1a64(const void* data, size_t n);
uint64_t fnv1a64(const std::string& s);

// Hash of the experiment identity: the canonical dump of the config with the
// execution-only keys (seed, samples, batches, index_offset, workers, out)
// removed. Two runs may be merged iff their hashes agree.
std::string config_hash(json config);

// Accumulator files: config echo + hash + keys + batch records.
void save_counts(const std::string& path, const json& config, const EventCounts& ec);

struct CountsFile {
  json config;
  std::string hash;
  EventCounts counts;
};
CountsFile load_counts(const std::string& path);  // runtime_error on damage or hash drift

// Folds b into a. Throws runtime_error on hash or key mismatch; overlapping
// (seed, index-range) coverage is rejected by the accumulator itself.
void merge_counts(CountsFile& a, const CountsFile& b);

std::string g17(double v);  // shortest %.17g rendering, round-trip exact
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_text(const std::string& path, const std::string& body);

}  // namespace percolog
