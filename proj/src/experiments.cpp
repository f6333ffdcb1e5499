#include "percolog/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "percolog/arms.hpp"
#include "percolog/cardy.hpp"
#include "percolog/correlators.hpp"
#include "percolog/enumerate.hpp"
#include "percolog/mixedboundary.hpp"
#include "percolog/multiscale.hpp"

namespace percolog {

namespace {

[[noreturn]] void bad_params(const std::string& msg) {
  throw std::invalid_argument("config.params: " + msg);
}

double p_num(const json& p, const char* key) {
  if (!p.contains(key) || !p.at(key).is_number()) bad_params(std::string(key) + " must be a number");
  return p.at(key).get<double>();
}

std::vector<int> p_int_array(const json& p, const char* key) {
  if (!p.contains(key) || !p.at(key).is_array()) bad_params(std::string(key) + " must be an array");
  std::vector<int> out;
  for (const json& v : p.at(key)) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
      bad_params(std::string(key) + " must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

std::vector<double> p_num_array(const json& p, const char* key) {
  if (!p.contains(key) || !p.at(key).is_array()) bad_params(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const json& v : p.at(key)) {
    if (!v.is_number()) bad_params(std::string(key) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::array<Site, 4> p_quad_sites(const json& p, const char* key,
                                 const std::shared_ptr<const TriLattice>& lat) {
  if (!p.contains(key) || !p.at(key).is_array() || p.at(key).size() != 4)
    bad_params(std::string(key) + " must be an array of four [i,j] pairs");
  std::array<Site, 4> s{};
  for (int k = 0; k < 4; ++k) {
    const json& z = p.at(key)[size_t(k)];
    if (!z.is_array() || z.size() != 2) bad_params(std::string(key) + " entries must be [i,j]");
    const int i = z[0].get<int>(), j = z[1].get<int>();
    if (!lat->inside(i, j)) bad_params(std::string(key) + " site out of the lattice");
    s[size_t(k)] = lat->at(i, j);
  }
  return s;
}

std::string fmtg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return std::string(buf);
}

ArmPattern named_pattern(const std::string& name) {
  if (name == "open") return pattern_open();
  if (name == "open_closed") return pattern_open_closed();
  if (name == "open_closed_open") return pattern_open_closed_open();
  if (name == "four_alternating") return pattern_four_alternating();
  bad_params("pattern must be open | open_closed | open_closed_open | four_alternating");
}

void need_geometry(const ExperimentConfig& cfg, Geometry g, const char* why) {
  if (cfg.geometry != g)
    throw std::invalid_argument(std::string("config: ") + cfg.kind + " needs a " + why +
                                " lattice");
}

ExperimentPlan plan_twopoint(const ExperimentConfig& cfg) {
  need_geometry(cfg, Geometry::BulkBox, "bulk");
  require_keys(cfg.params, {"r"}, "config.params");
  const std::vector<int> seps = p_int_array(cfg.params, "r");
  if (seps.empty()) bad_params("r must be non-empty");
  for (size_t k = 0; k < seps.size(); ++k)
    if (seps[k] < 1 || (k && seps[k] <= seps[k - 1]))
      bad_params("r must be strictly increasing and >= 1");
  ExperimentPlan plan;
  plan.lat = std::make_shared<TriLattice>(lattice_spec(cfg));
  for (int r : seps) plan.keys.push_back("r" + std::to_string(r));
  auto probes = std::make_shared<TwoPointProbes>(two_point_probes(*plan.lat, seps));
  auto lat = plan.lat;
  plan.make_kernel = [lat, probes]() {
    auto uf = std::make_shared<UnionFind>();
    return [lat, probes, uf](const Configuration& c, uint64_t* t) {
      eval_two_point(c, *lat, *probes, *uf, t);
    };
  };
  return plan;
}

QuadGeometry quad_from_params(const ExperimentConfig& cfg,
                              const std::shared_ptr<const TriLattice>& lat) {
  if (cfg.kind == "boundary-fourpoint") {
    require_keys(cfg.params, {"x"}, "config.params");
    const std::vector<int> xs = p_int_array(cfg.params, "x");
    if (xs.size() != 4) bad_params("x must hold four boundary columns");
    std::array<Site, 4> s{};
    for (int k = 0; k < 4; ++k) {
      if (xs[size_t(k)] < 0 || xs[size_t(k)] >= lat->W) bad_params("x out of the boundary row");
      s[size_t(k)] = lat->at(xs[size_t(k)], 0);
    }
    return boundary_quad(*lat, s);
  }
  require_keys(cfg.params, {"z"}, "config.params");
  return bulk_quad(*lat, p_quad_sites(cfg.params, "z", lat));
}

ExperimentPlan plan_fourpoint(const ExperimentConfig& cfg) {
  if (cfg.kind == "boundary-fourpoint")
    need_geometry(cfg, Geometry::HalfPlaneStrip, "halfplane");
  else
    need_geometry(cfg, Geometry::BulkBox, "bulk");
  ExperimentPlan plan;
  plan.lat = std::make_shared<TriLattice>(lattice_spec(cfg));
  auto quad = std::make_shared<QuadGeometry>(quad_from_params(cfg, plan.lat));
  plan.keys = {"all_four", "p12_34", "p13_24", "p14_23", "other", "conn12", "conn34"};
  auto lat = plan.lat;
  plan.make_kernel = [lat, quad]() {
    auto uf = std::make_shared<UnionFind>();
    return [lat, quad, uf](const Configuration& c, uint64_t* t) {
      const FourPointFlags f = eval_four_point(c, *lat, *quad, *uf);
      ++t[size_t(f.cls)];  // enum order matches the key order
      if (f.conn12) ++t[5];
      if (f.conn34) ++t[6];
    };
  };
  return plan;
}

ExperimentPlan plan_multiscale(const ExperimentConfig& cfg) {
  require_keys(cfg.params, {"z"}, "config.params");
  ExperimentPlan plan;
  plan.lat = std::make_shared<TriLattice>(lattice_spec(cfg));
  auto lad = std::make_shared<ScaleLadder>(
      build_scales(*plan.lat, p_quad_sites(cfg.params, "z", plan.lat)));
  plan.keys = multiscale_keys(lad->N);
  plan.make_kernel = [lad]() {
    auto ar = std::make_shared<MultiscaleArena>();
    return [lad, ar](const Configuration& c, uint64_t* t) { eval_multiscale(c, *lad, *ar, t); };
  };
  return plan;
}

ExperimentPlan plan_arms(const ExperimentConfig& cfg) {
  require_keys(cfg.params, {"pattern", "r", "x", "center", "r0"}, "config.params");
  if (!cfg.params.contains("pattern") || !cfg.params.at("pattern").is_string())
    bad_params("pattern must be a string");
  const ArmPattern pat = named_pattern(cfg.params.at("pattern").get<std::string>());
  const std::vector<double> radii = p_num_array(cfg.params, "r");
  if (radii.empty()) bad_params("r must be non-empty");
  for (size_t k = 0; k < radii.size(); ++k)
    if (radii[k] <= 0 || (k && radii[k] <= radii[k - 1]))
      bad_params("r must be strictly increasing and positive");
  const double r0 = cfg.params.contains("r0") ? p_num(cfg.params, "r0") : 2.0;

  ExperimentPlan plan;
  plan.lat = std::make_shared<TriLattice>(lattice_spec(cfg));
  for (double r : radii) plan.keys.push_back("r" + fmtg(r));
  auto lat = plan.lat;

  if (cfg.geometry == Geometry::HalfPlaneStrip) {
    if (cfg.params.contains("center")) bad_params("center is a bulk-only key");
    const int x = cfg.params.contains("x") ? int(p_num(cfg.params, "x")) : lat->W / 2;
    if (x < 0 || x >= lat->W) bad_params("x out of the boundary row");
    const Site xs = lat->at(x, 0);
    auto rs = std::make_shared<std::vector<double>>(radii);
    plan.make_kernel = [lat, xs, rs, pat, r0]() {
      return [lat, xs, rs, pat, r0](const Configuration& c, uint64_t* t) {
        for (size_t k = 0; k < rs->size(); ++k)
          if (boundary_arm_event(c, *lat, xs, (*rs)[k], pat, r0)) ++t[k];
      };
    };
    return plan;
  }

  if (cfg.params.contains("x")) bad_params("x is a halfplane-only key");
  Point centre = lat->pos(lat->at(lat->W / 2, lat->H / 2));
  if (cfg.params.contains("center")) {
    const std::vector<int> ij = p_int_array(cfg.params, "center");
    if (ij.size() != 2 || !lat->inside(ij[0], ij[1])) bad_params("center must be an [i,j] site");
    centre = lat->pos(lat->at(ij[0], ij[1]));
  }
  auto rings = std::make_shared<std::vector<RegionMask>>();
  for (double r : radii) rings->push_back(annulus_mask(*lat, centre, r0, r));
  plan.make_kernel = [rings, pat]() {
    return [rings, pat](const Configuration& c, uint64_t* t) {
      for (size_t k = 0; k < rings->size(); ++k)
        if (annulus_arm_event(c, (*rings)[k], pat)) ++t[k];
    };
  };
  return plan;
}

ExperimentPlan plan_crossing(const ExperimentConfig& cfg) {
  need_geometry(cfg, Geometry::BulkBox, "bulk");
  require_keys(cfg.params, {"shape", "aspect", "rows"}, "config.params");
  const std::string shape =
      cfg.params.contains("shape") ? cfg.params.at("shape").get<std::string>() : "rectangle";
  ExperimentPlan plan;
  plan.lat = std::make_shared<TriLattice>(lattice_spec(cfg));
  plan.keys = {"crossing"};
  auto lat = plan.lat;
  if (shape == "rhombus") {
    if (cfg.params.contains("aspect") || cfg.params.contains("rows"))
      bad_params("rhombus crossing takes no aspect/rows");
    plan.make_kernel = [lat]() {
      auto uf = std::make_shared<UnionFind>();
      return [lat, uf](const Configuration& c, uint64_t* t) {
        if (eval_rhombus_crossing(c, *lat, *uf)) ++t[0];
      };
    };
    return plan;
  }
  if (shape != "rectangle") bad_params("shape must be rectangle or rhombus");
  const double aspect = cfg.params.contains("aspect") ? p_num(cfg.params, "aspect") : 1.0;
  if (aspect <= 0) bad_params("aspect must be positive");
  const int rows = cfg.params.contains("rows") ? int(p_num(cfg.params, "rows")) : cfg.L / 2;
  auto rect = std::make_shared<RectangleRegion>(rectangle_region(*lat, aspect, rows));
  plan.make_kernel = [rect]() {
    auto uf = std::make_shared<UnionFind>();
    return [rect, uf](const Configuration& c, uint64_t* t) {
      if (eval_rectangle_crossing(c, *rect, *uf)) ++t[0];
    };
  };
  return plan;
}

ExperimentPlan plan_mixed(const ExperimentConfig& cfg) {
  need_geometry(cfg, Geometry::HalfPlaneStrip, "halfplane");
  require_keys(cfg.params, {"marks", "r_macro"}, "config.params");
  const std::vector<int> marks = p_int_array(cfg.params, "marks");
  if (marks.size() != 4) bad_params("marks must hold four boundary columns");
  const double r_macro = cfg.params.contains("r_macro") ? p_num(cfg.params, "r_macro") : 0.0;
  ExperimentPlan plan;
  plan.lat = std::make_shared<TriLattice>(lattice_spec(cfg));
  auto geo = std::make_shared<MixedGeometry>(
      mixed_geometry(*plan.lat, marks[0], marks[1], marks[2], marks[3], r_macro));
  plan.keys = mixed_keys();
  plan.make_kernel = [geo]() {
    auto comps = std::make_shared<LatticeComponents>();
    return [geo, comps](const Configuration& c, uint64_t* t) {
      ++t[size_t(classify_mixed_event(c, *geo, *comps).cls)];
    };
  };
  return plan;
}

ExperimentConfig calibrate_target(const ExperimentConfig& cfg) {
  if (!cfg.params.contains("target_kind") || !cfg.params.at("target_kind").is_string())
    bad_params("calibrate needs target_kind");
  ExperimentConfig sub = cfg;
  sub.kind = cfg.params.at("target_kind").get<std::string>();
  if (sub.kind == "calibrate" || sub.kind == "oracle-suite")
    bad_params("target_kind must be a sampling kind");
  sub.params = cfg.params;
  sub.params.erase("target_kind");
  return sub;
}

}  // namespace

ExperimentPlan build_plan(const ExperimentConfig& cfg) {
  if (cfg.kind == "twopoint") return plan_twopoint(cfg);
  if (cfg.kind == "fourpoint" || cfg.kind == "boundary-fourpoint") return plan_fourpoint(cfg);
  if (cfg.kind == "multiscale") return plan_multiscale(cfg);
  if (cfg.kind == "arms") return plan_arms(cfg);
  if (cfg.kind == "crossing") return plan_crossing(cfg);
  if (cfg.kind == "mixed") return plan_mixed(cfg);
  if (cfg.kind == "calibrate") return build_plan(calibrate_target(cfg));
  throw std::invalid_argument("config: \"" + cfg.kind + "\" is not a sampling kind");
}

EventCounts run_plan(const ExperimentPlan& plan, uint64_t seed, uint64_t index_offset,
                     uint64_t samples, uint64_t batches, int workers) {
  try {
    check_batching(samples, int(batches));
  } catch (const std::invalid_argument& e) {
    throw StatError(e.what());
  }
  int nthreads = workers > 0 ? workers : int(std::thread::hardware_concurrency());
  if (nthreads < 1) nthreads = 1;
  nthreads = int(std::min<uint64_t>(uint64_t(nthreads), batches));

  std::vector<BatchRecord> recs(batches);
  std::atomic<uint64_t> next{0};
  const auto worker = [&]() {
    auto kernel = plan.make_kernel();
    Configuration c;
    std::vector<uint64_t> t(plan.keys.size());
    for (;;) {
      const uint64_t b = next.fetch_add(1);
      if (b >= batches) break;
      const BatchRange r = batch_range(samples, int(batches), int(b), index_offset);
      std::fill(t.begin(), t.end(), 0);
      for (uint64_t k = r.first; k < r.first + r.n; ++k) {
        sample_configuration(*plan.lat, seed, k, c);
        kernel(c, t.data());
      }
      recs[b] = BatchRecord{seed, r.first, r.n, t};
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < nthreads; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  EventCounts ec(plan.keys);
  for (BatchRecord& r : recs) ec.add_batch(std::move(r));
  return ec;
}

namespace {

json estimate_json(const Estimate& e) {
  return json{{"value", e.value}, {"sigma", e.sigma}, {"n", e.n}};
}

json fit_json(const FitResult& f) {
  return json{{"intercept", f.intercept},   {"slope", f.slope},
              {"sigma_intercept", f.sigma_intercept}, {"sigma_slope", f.sigma_slope},
              {"r2", f.r2},                 {"npoints", f.npoints},
              {"excluded", f.excluded}};
}

json class_table(const EventCounts& ec, const std::vector<std::string>& keys) {
  json out = json::array();
  for (const std::string& key : keys) {
    const Estimate e = frequency(ec, key);
    out.push_back(json{{"class", key},
                       {"count", ec.total(key)},
                       {"frequency", e.value},
                       {"sigma", e.sigma}});
  }
  return out;
}

json report_twopoint(const ExperimentConfig& cfg, const EventCounts& ec) {
  const TriLattice lat(lattice_spec(cfg));
  const std::vector<int> seps = p_int_array(cfg.params, "r");
  const TwoPointProbes pr = two_point_probes(lat, seps);
  std::vector<TwoPointRow> rows;
  json jrows = json::array();
  for (size_t k = 0; k < seps.size(); ++k) {
    TwoPointRow row;
    row.r = double(seps[k]);
    row.in_window = pr.in_window[k];
    row.est = frequency(ec, "r" + std::to_string(seps[k]));
    rows.push_back(row);
    jrows.push_back(json{{"r", row.r},
                         {"value", row.est.value},
                         {"sigma", row.est.sigma},
                         {"in_window", row.in_window}});
  }
  json out{{"rows", jrows}};
  try {
    out["fit"] = fit_json(two_point_fit(rows));
  } catch (const std::invalid_argument&) {
    out["fit"] = nullptr;  // fewer than 3 usable window rows
  }
  return out;
}

json report_fourpoint(const ExperimentConfig& cfg, const EventCounts& ec) {
  json out{{"classes",
            class_table(ec, {"all_four", "p12_34", "p13_24", "p14_23", "other"})},
           {"conn12", estimate_json(frequency(ec, "conn12"))},
           {"conn34", estimate_json(frequency(ec, "conn34"))},
           {"g_hat", estimate_json(g_from_counts(ec))}};
  const TriLattice lat(lattice_spec(cfg));
  auto shared = std::make_shared<const TriLattice>(lat);
  const QuadGeometry q = quad_from_params(cfg, shared);
  out["cross_ratio"] = q.x;
  out["r12"] = q.r12;
  out["r34"] = q.r34;
  return out;
}

json report_multiscale(const ExperimentConfig& cfg, const EventCounts& ec) {
  auto lat = std::make_shared<const TriLattice>(lattice_spec(cfg));
  const ScaleLadder lad = build_scales(*lat, p_quad_sites(cfg.params, "z", lat));
  const MultiscaleReport rep = multiscale_report(ec, lad);
  json rows = json::array();
  for (const GnRow& r : rep.g)
    rows.push_back(json{{"n", r.n},
                        {"radius", r.radius},
                        {"cond_first", r.cond_first},
                        {"cond_reach", r.cond_reach},
                        {"defined", r.defined},
                        {"g", r.g.value},
                        {"g_sigma", r.g.sigma}});
  json gaps = json::array();
  for (const Estimate& e : rep.factor_gap) gaps.push_back(estimate_json(e));
  json out{{"g_table", rows},
           {"prefix", rep.prefix},
           {"factor_gap", gaps},
           {"joint", rep.joint},
           {"telescoping_exact", rep.telescoping_exact}};
  if (rep.prefix >= 3) {
    out["logsum"] = json{{"S", rep.logsum.S},
                         {"S_sigma", rep.logsum.S_sigma},
                         {"fit", fit_json(rep.logsum.fit)},
                         {"slope_sigma", rep.logsum.slope_sigma}};
  } else {
    out["logsum"] = nullptr;
  }
  return out;
}

json report_arms(const ExperimentConfig& cfg, const EventCounts& ec) {
  const std::vector<double> radii = p_num_array(cfg.params, "r");
  json rows = json::array();
  std::vector<FitPoint> pts;
  for (double r : radii) {
    const Estimate e = frequency(ec, "r" + fmtg(r));
    rows.push_back(json{{"r", r}, {"value", e.value}, {"sigma", e.sigma}});
    pts.push_back({r, e.value, e.sigma});
  }
  json out{{"rows", rows}};
  try {
    out["fit"] = fit_json(fit_power_law(pts));
  } catch (const std::invalid_argument&) {
    out["fit"] = nullptr;
  }
  return out;
}

json report_crossing(const ExperimentConfig& cfg, const EventCounts& ec) {
  const std::string shape =
      cfg.params.contains("shape") ? cfg.params.at("shape").get<std::string>() : "rectangle";
  const Estimate e = frequency(ec, "crossing");
  double reference = 0.5, aspect = 1.0;
  if (shape == "rectangle") {
    aspect = cfg.params.contains("aspect") ? cfg.params.at("aspect").get<double>() : 1.0;
    reference = cardy_crossing(aspect);
  }
  return json{{"shape", shape},
              {"aspect", aspect},
              {"crossing", estimate_json(e)},
              {"reference", reference},
              {"z", e.sigma > 0 ? (e.value - reference) / e.sigma : 0.0}};
}

json report_mixed(const ExperimentConfig&, const EventCounts& ec) {
  return json{{"classes", class_table(ec, mixed_keys())}};
}

json report_calibrate(const ExperimentConfig& cfg, const EventCounts& ec) {
  json rows = json::array();
  const double n = double(ec.total_samples());
  for (const std::string& key : ec.keys) {
    const uint64_t hits = ec.total(key);
    const double p = n > 0 ? double(hits) / n : 0.0;
    const double sigma = n > 0 ? std::sqrt(p * (1 - p) / n) : 0.0;
    // samples for a 10% relative binomial error on this key's frequency
    const uint64_t needed = p > 0 ? uint64_t(std::ceil(100.0 * (1 - p) / p)) : 0;
    rows.push_back(json{{"key", key},
                        {"count", hits},
                        {"rate", p},
                        {"sigma", sigma},
                        {"needed_rel10", needed}});
  }
  json out{{"rows", rows}, {"target_kind", cfg.params.at("target_kind")}};
  return out;
}

}  // namespace

json report_plan(const ExperimentConfig& cfg, const EventCounts& ec) {
  json body;
  if (cfg.kind == "twopoint")
    body = report_twopoint(cfg, ec);
  else if (cfg.kind == "fourpoint" || cfg.kind == "boundary-fourpoint")
    body = report_fourpoint(cfg, ec);
  else if (cfg.kind == "multiscale")
    body = report_multiscale(cfg, ec);
  else if (cfg.kind == "arms")
    body = report_arms(cfg, ec);
  else if (cfg.kind == "crossing")
    body = report_crossing(cfg, ec);
  else if (cfg.kind == "mixed")
    body = report_mixed(cfg, ec);
  else if (cfg.kind == "calibrate")
    body = report_calibrate(cfg, ec);
  else
    throw std::invalid_argument("config: \"" + cfg.kind + "\" has no report");
  body["kind"] = cfg.kind;
  body["samples"] = ec.total_samples();
  body["batches"] = ec.batches.size();
  return body;
}

namespace {

void csv_rows_for(const ExperimentConfig& cfg, const json& rep, const std::string& outdir,
                  std::vector<std::string>& files) {
  const auto emit = [&](const std::string& name, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
    write_csv(outdir + "/" + name, header, rows);
    files.push_back(name);
  };
  if (cfg.kind == "twopoint") {
    std::vector<std::vector<std::string>> rows;
    for (const json& r : rep.at("rows"))
      rows.push_back({fmtg(r.at("r").get<double>()), g17(r.at("value").get<double>()),
                      g17(r.at("sigma").get<double>()),
                      r.at("in_window").get<bool>() ? "1" : "0"});
    emit("twopoint.csv", {"r", "value", "sigma", "in_window"}, rows);
  } else if (cfg.kind == "fourpoint" || cfg.kind == "boundary-fourpoint" ||
             cfg.kind == "mixed") {
    std::vector<std::vector<std::string>> rows;
    for (const json& r : rep.at("classes"))
      rows.push_back({r.at("class").get<std::string>(),
                      std::to_string(r.at("count").get<uint64_t>()),
                      g17(r.at("frequency").get<double>()), g17(r.at("sigma").get<double>())});
    emit(cfg.kind == "mixed" ? "mixed.csv" : "partition.csv",
         {"class", "count", "frequency", "sigma"}, rows);
  } else if (cfg.kind == "multiscale") {
    std::vector<std::vector<std::string>> rows;
    for (const json& r : rep.at("g_table"))
      rows.push_back({std::to_string(r.at("n").get<int>()), fmtg(r.at("radius").get<double>()),
                      std::to_string(r.at("cond_first").get<uint64_t>()),
                      std::to_string(r.at("cond_reach").get<uint64_t>()),
                      r.at("defined").get<bool>() ? "1" : "0", g17(r.at("g").get<double>()),
                      g17(r.at("g_sigma").get<double>())});
    emit("gtable.csv", {"n", "radius", "cond_first", "cond_reach", "defined", "g", "g_sigma"},
         rows);
    std::vector<std::vector<std::string>> srows;
    if (!rep.at("logsum").is_null()) {
      const json& ls = rep.at("logsum");
      for (size_t k = 0; k < ls.at("S").size(); ++k)
        srows.push_back({std::to_string(k + 1), g17(ls.at("S")[k].get<double>()),
                         g17(ls.at("S_sigma")[k].get<double>())});
    }
    emit("logsum.csv", {"prefix_n", "S", "S_sigma"}, srows);
  } else if (cfg.kind == "arms") {
    std::vector<std::vector<std::string>> rows;
    for (const json& r : rep.at("rows"))
      rows.push_back({fmtg(r.at("r").get<double>()), g17(r.at("value").get<double>()),
                      g17(r.at("sigma").get<double>())});
    emit("arms.csv", {"r", "value", "sigma"}, rows);
  } else if (cfg.kind == "crossing") {
    emit("crossing.csv", {"shape", "aspect", "value", "sigma", "reference"},
         {{rep.at("shape").get<std::string>(), fmtg(rep.at("aspect").get<double>()),
           g17(rep.at("crossing").at("value").get<double>()),
           g17(rep.at("crossing").at("sigma").get<double>()),
           g17(rep.at("reference").get<double>())}});
  } else if (cfg.kind == "calibrate") {
    std::vector<std::vector<std::string>> rows;
    for (const json& r : rep.at("rows"))
      rows.push_back({r.at("key").get<std::string>(),
                      std::to_string(r.at("count").get<uint64_t>()),
                      g17(r.at("rate").get<double>()), g17(r.at("sigma").get<double>()),
                      std::to_string(r.at("needed_rel10").get<uint64_t>())});
    emit("calibrate.csv", {"key", "count", "rate", "sigma", "needed_rel10"}, rows);
  }
}

}  // namespace

std::vector<std::string> emit_outputs(const ExperimentConfig& cfg, const json& file_config,
                                      const EventCounts& ec, const std::string& outdir) {
  std::filesystem::create_directories(outdir);
  std::vector<std::string> files;

  save_counts(outdir + "/counts.json", file_config, ec);
  files.push_back("counts.json");

  const json rep = report_plan(cfg, ec);
  write_text(outdir + "/report.json", rep.dump(2) + "\n");
  files.push_back("report.json");

  csv_rows_for(cfg, rep, outdir, files);

  json manifest{{"kind", cfg.kind},
                {"config_hash", config_hash(file_config)},
                {"seed", cfg.seed},
                {"index_offset", cfg.index_offset},
                {"samples", cfg.samples},
                {"batches", cfg.batches},
                {"version", "percolog 1.0"},
                {"outputs", files}};
  write_text(outdir + "/manifest.json", manifest.dump(2) + "\n");
  files.push_back("manifest.json");
  return files;
}

// ---- oracle battery ----

namespace {

OracleLine line_from_check(const OracleCheck& oc) {
  const double sigma =
      std::sqrt(oc.exact * (1.0 - oc.exact) / double(oc.samples ? oc.samples : 1));
  return {oc.name, oc.exact, oc.mc, sigma, std::abs(oc.z), !oc.flagged};
}

OracleLine identity_line(const std::string& name, double exact, double got, double tol) {
  OracleLine l{name, exact, got, 0.0, 0.0, std::abs(got - exact) <= tol};
  return l;
}

}  // namespace

std::vector<OracleLine> run_oracle_suite() {
  std::vector<OracleLine> lines;

  {  // 4x4 rhombus: exact enumeration vs sampling, connection events
    const TriLattice lat(LatticeSpec{Geometry::BulkBox, 4, 0.5});
    const std::array<Site, 4> corners = {lat.at(0, 0), lat.at(3, 0), lat.at(3, 3), lat.at(0, 3)};
    std::vector<std::string> names = {"p_adjacent_pair", "p_long_diagonal", "partition_all_four",
                                      "partition_p12_34"};
    const RegionMask all = full_mask(lat);
    std::vector<EventFn> events = {
        [&lat, all](const Configuration& c) {
          return connected_within(c, all, lat.at(0, 1), lat.at(2, 1));
        },
        [&lat, all](const Configuration& c) {
          return connected_within(c, all, lat.at(0, 0), lat.at(3, 3));
        },
        [&](const Configuration& c) {
          return cluster_partition(c, lat, corners) == PartitionClass::AllFour;
        },
        [&](const Configuration& c) {
          return cluster_partition(c, lat, corners) == PartitionClass::P12_34;
        }};
    for (const OracleCheck& oc : compare_mc_exact(lat, names, events, 200000, 1001))
      lines.push_back(line_from_check(oc));

    // planar obstruction: the diagonal pairing never occurs
    const std::vector<ExactProbability> ep = exact_enumerate(
        lat, {[&](const Configuration& c) {
          return cluster_partition(c, lat, corners) == PartitionClass::P13_24;
        }});
    lines.push_back(identity_line("partition_p13_24_impossible", 0.0, ep[0].value(), 0.0));
  }

  {  // rhombus crossing probability is exactly 1/2 by self-duality
    const TriLattice lat(LatticeSpec{Geometry::BulkBox, 64, 0.5});
    const Estimate e = crossing_rhombus(lat, 100000, 1002, 50);
    lines.push_back(
        {"rhombus_crossing_half", 0.5, e.value, e.sigma, std::abs(e.value - 0.5) / e.sigma,
         std::abs(e.value - 0.5) < 3.0 * e.sigma});
  }

  {  // crossing-formula identities
    lines.push_back(identity_line("crossing_square_half", 0.5, cardy_crossing(1.0), 1e-12));
    lines.push_back(identity_line("crossing_aspect_duality", 1.0,
                                  cardy_crossing(4.0 / 3.0) + cardy_crossing(3.0 / 4.0), 1e-10));
  }

  {  // tiny halfplane: boundary one-arm event, enumeration vs sampling
    const TriLattice lat(LatticeSpec{Geometry::HalfPlaneStrip, 6, 0.5});
    const Site x = lat.at(3, 0);
    std::vector<EventFn> events = {[&](const Configuration& c) {
      return boundary_arm_event(c, lat, x, 1.7, pattern_open(), 0.6);
    }};
    for (const OracleCheck& oc :
         compare_mc_exact(lat, {"boundary_one_arm_tiny"}, events, 200000, 1003))
      lines.push_back(line_from_check(oc));
  }

  {  // tiny strip scale ladder: exact conditional couplings vs sampling
    const TriLattice lat(LatticeSpec{Geometry::HalfPlaneStrip, 7, 0.5});
    const ScaleLadder lad =
        make_ladder(lat, {lat.at(1, 0), lat.at(3, 0), lat.at(6, 0), lat.at(4, 2)},
                    lat.pos(lat.at(2, 0)), {1.05, 2.2, 3.2});
    const std::vector<std::string> keys = multiscale_keys(lad.N);
    std::vector<uint64_t> exact(keys.size(), 0), t(keys.size(), 0);
    MultiscaleArena ar;
    Configuration c;
    c.resize(lat.nsites());
    for (uint64_t m = 0; m < (1ull << lat.nsites()); ++m) {
      c.words[0] = m;
      std::fill(t.begin(), t.end(), 0);
      eval_multiscale(c, lad, ar, t.data());
      for (size_t k = 0; k < keys.size(); ++k) exact[k] += t[k];
    }
    EventCounts ec = estimate_multiscale(lad, 1500000, 1004, 50);
    for (int n = 1; n <= lad.N; ++n) {
      // exact coupling from the enumerated tallies: b/a - d/c
      const size_t a = 2 + size_t(lad.N) + size_t(n) - 1, b = a + size_t(lad.N);
      const size_t cc = b + size_t(lad.N), d = cc + size_t(lad.N);
      const double g_exact =
          double(exact[b]) / double(exact[a]) - double(exact[d]) / double(exact[cc]);
      const GnRow row = estimate_gn(ec, lad, n);
      const double z = row.defined && row.g.sigma > 0
                           ? std::abs(row.g.value - g_exact) / row.g.sigma
                           : 1e9;
      lines.push_back({"ladder_coupling_g" + std::to_string(n), g_exact, row.g.value,
                       row.g.sigma, z, row.defined && z < 3.0});
    }
  }

  {  // log-term integral: closed form vs adaptive quadrature
    const double closed = log_term_integral(0, 1, 2, 3);
    lines.push_back(identity_line("log_term_quadrature", closed,
                                  log_term_quadrature(0, 1, 2, 3), 1e-10));
    lines.push_back(
        identity_line("log_term_value", std::log(4.0 / 3.0), closed, 1e-14));
  }

  return lines;
}

json oracle_report(const std::vector<OracleLine>& lines) {
  json rows = json::array();
  bool all = true;
  for (const OracleLine& l : lines) {
    rows.push_back(json{{"name", l.name},
                        {"exact", l.exact},
                        {"estimate", l.estimate},
                        {"sigma", l.sigma},
                        {"z", l.z},
                        {"pass", l.pass}});
    all = all && l.pass;
  }
  return json{{"lines", rows}, {"all_pass", all}};
}

}  // namespace percolog
