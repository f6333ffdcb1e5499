#include "percolog/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace percolog {

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  for (const auto& item : obj.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw std::invalid_argument(where + ": unknown key \"" + item.key() + "\"");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

namespace {

bool nonneg_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<int64_t>() >= 0);
}

uint64_t require_uint(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!nonneg_integer(v))
    throw std::invalid_argument(where + ": \"" + key + "\" must be a non-negative integer");
  return v.get<uint64_t>();
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  require_keys(j, {"kind", "lattice", "samples", "seed", "batches", "index_offset", "workers",
                   "out", "params"},
               "config");
  for (const char* key : {"kind", "lattice", "samples", "seed"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("config: missing \"") + key + "\"");

  ExperimentConfig cfg;
  if (!j.at("kind").is_string()) throw std::invalid_argument("config: \"kind\" must be a string");
  cfg.kind = j.at("kind").get<std::string>();
  static const std::vector<std::string> kinds = {
      "twopoint", "fourpoint", "boundary-fourpoint", "multiscale", "arms",
      "crossing", "mixed",     "oracle-suite",       "calibrate"};
  if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end())
    throw std::invalid_argument("config: unknown kind \"" + cfg.kind + "\"");

  const json& lat = j.at("lattice");
  require_keys(lat, {"geometry", "L"}, "config.lattice");
  if (!lat.contains("geometry") || !lat.contains("L"))
    throw std::invalid_argument("config.lattice: needs \"geometry\" and \"L\"");
  const std::string geom = lat.at("geometry").get<std::string>();
  if (geom == "bulk")
    cfg.geometry = Geometry::BulkBox;
  else if (geom == "halfplane")
    cfg.geometry = Geometry::HalfPlaneStrip;
  else
    throw std::invalid_argument("config.lattice: geometry must be \"bulk\" or \"halfplane\"");
  if (!nonneg_integer(lat.at("L")) || lat.at("L").get<uint64_t>() < 2)
    throw std::invalid_argument("config.lattice: L must be an integer >= 2");
  cfg.L = int(lat.at("L").get<uint64_t>());

  cfg.samples = require_uint(j, "samples", "config");
  if (cfg.samples == 0) throw std::invalid_argument("config: samples must be positive");
  cfg.seed = require_uint(j, "seed", "config");
  if (j.contains("batches")) {
    cfg.batches = require_uint(j, "batches", "config");
    if (cfg.batches == 0) throw std::invalid_argument("config: batches must be positive");
  }
  if (j.contains("index_offset")) cfg.index_offset = require_uint(j, "index_offset", "config");
  if (j.contains("workers")) cfg.workers = int(require_uint(j, "workers", "config"));
  if (j.contains("out")) {
    if (!j.at("out").is_string())
      throw std::invalid_argument("config: \"out\" must be a string");
    cfg.out = j.at("out").get<std::string>();
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object())
      throw std::invalid_argument("config: \"params\" must be an object");
    cfg.params = j.at("params");
  }
  return cfg;
}

LatticeSpec lattice_spec(const ExperimentConfig& cfg) {
  return LatticeSpec{cfg.geometry, cfg.L, 0.5};
}

uint64_t fnv1a64(const void* data, size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = 14695981039346656037ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string config_hash(json config) {
  for (const char* key : {"seed", "samples", "batches", "index_offset", "workers", "out"})
    config.erase(key);
  const std::string canon = config.dump();  // object keys are stored sorted
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a64(canon));
  return std::string(buf);
}

void save_counts(const std::string& path, const json& config, const EventCounts& ec) {
  json j;
  j["config"] = config;
  j["config_hash"] = config_hash(config);
  j["keys"] = ec.keys;
  json batches = json::array();
  for (const BatchRecord& b : ec.batches)
    batches.push_back(json::array({b.seed, b.first_index, b.n, b.tallies}));
  j["batches"] = std::move(batches);
  write_text(path, j.dump(2) + "\n");
}

CountsFile load_counts(const std::string& path) {
  const json j = load_json_file(path);
  for (const char* key : {"config", "config_hash", "keys", "batches"})
    if (!j.contains(key)) throw std::runtime_error(path + ": missing \"" + key + "\"");
  CountsFile f;
  f.config = j.at("config");
  f.hash = j.at("config_hash").get<std::string>();
  if (config_hash(f.config) != f.hash)
    throw std::runtime_error(path + ": config hash does not match the embedded config");
  f.counts.keys = j.at("keys").get<std::vector<std::string>>();
  for (const json& b : j.at("batches")) {
    if (!b.is_array() || b.size() != 4) throw std::runtime_error(path + ": malformed batch");
    BatchRecord rec;
    rec.seed = b[0].get<uint64_t>();
    rec.first_index = b[1].get<uint64_t>();
    rec.n = b[2].get<uint64_t>();
    rec.tallies = b[3].get<std::vector<uint64_t>>();
    f.counts.add_batch(std::move(rec));
  }
  return f;
}

void merge_counts(CountsFile& a, const CountsFile& b) {
  if (a.hash != b.hash)
    throw std::runtime_error("merge: config hash mismatch (" + a.hash + " vs " + b.hash + ")");
  try {
    a.counts.merge(b.counts);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("merge: ") + e.what());
  }
  // Inputs only agree on the hashed core, so rebuild the volatile keys from the
  // merged batches; either merge order then yields byte-identical output.
  if (!a.counts.batches.empty()) {
    for (const char* key : {"seed", "samples", "batches", "index_offset", "workers", "out"})
      a.config.erase(key);
    a.config["seed"] = a.counts.batches.front().seed;
    a.config["index_offset"] = a.counts.batches.front().first_index;
    a.config["samples"] = a.counts.total_samples();
    a.config["batches"] = a.counts.batches.size();
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::string body;
  for (size_t k = 0; k < header.size(); ++k) {
    if (k) body += ',';
    body += header[k];
  }
  body += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("write_csv: row arity differs from header");
    for (size_t k = 0; k < row.size(); ++k) {
      if (k) body += ',';
      body += row[k];
    }
    body += '\n';
  }
  write_text(path, body);
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
  if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace percolog
