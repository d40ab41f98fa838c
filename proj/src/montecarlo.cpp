#include "larsnet/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "larsnet/link.hpp"
#include "larsnet/sensing.hpp"

namespace larsnet {

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  std::map<std::size_t, std::exception_ptr> errors;
  std::mutex error_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        errors.emplace(i, std::current_exception());
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!errors.empty()) std::rethrow_exception(errors.begin()->second);
}

namespace {

std::string scenario_id(const ScenarioConfig& scenario, double isd_m, const char* arm) {
  return scenario.name + "/" + std::to_string(isd_m) + "/" + arm;
}

IncumbentDrop draw_incumbent(const ScenarioConfig& scenario, const Deployment& deployment,
                             const DropRegion& region, const DropStreams& streams) {
  Engine stream = streams.stream(StreamKind::incumbent);
  for (;;) {
    IncumbentDrop drop = drop_incumbent(region, scenario.incumbent_height_m, stream);
    const bool colocated = std::any_of(deployment.sites.begin(), deployment.sites.end(),
                                       [&](const BsSite& s) {
                                         return s.x_m == drop.x_m && s.y_m == drop.y_m &&
                                                s.height_m == drop.height_m;
                                       });
    if (!colocated) return drop;
  }
}

}  // namespace

DropOutcome run_drop(const ScenarioConfig& scenario, const Deployment& deployment,
                     const DropRegion& region, const PropagationModel& model,
                     const DropStreams& streams, bool network_arm, bool single_arm,
                     bool edp_only) {
  DropOutcome out;
  SlotSimulationOptions sim;
  sim.simulate_duty = !edp_only;
  auto summarize = [&](const SlotTrace& trace, const char* arm) {
    MetricsReport r =
        summarize_trace(trace, scenario.ci_method, scenario_id(scenario, deployment.isd_m, arm));
    if (edp_only) {
      r.tdp = r.tmp_on = r.tmp_abs = kNaN;
      r.tdp_ci = r.tmp_on_ci = r.tmp_abs_ci = kNaN;
      r.n_detected = r.n_missed = 0;
    }
    return r;
  };
  out.incumbent = draw_incumbent(scenario, deployment, region, streams);
  const Emitter emitter{scenario.dish, out.incumbent};
  const Eigen::ArrayXXd table =
      sector_psd_table(deployment, emitter, scenario.sensor, scenario.link, model, streams);
  const double gamma = scenario.link.threshold_dbm_per_mhz;
  const double sigma = scenario.link.noise_sigma_db;

  if (network_arm) {
    const SensorSet sensors = make_sensor_set(deployment, table, scenario.fusion_unit());
    out.network = summarize(simulate_slots(sensors, gamma, sigma, scenario.slots, streams, sim),
                            "network");
  }
  if (single_arm) {
    const std::size_t center[] = {deployment.center_index};
    const SensorSet sensors = make_sensor_set(deployment, table, scenario.fusion_unit(), center);
    SlotModel single_slots = scenario.slots;
    single_slots.fusion_k = 1;
    out.single = summarize(simulate_slots(sensors, gamma, sigma, single_slots, streams, sim),
                           "single");
  }
  return out;
}

namespace {

struct PointResult {
  std::size_t site_count = 0;
  std::optional<MetricsReport> network;
  std::optional<MetricsReport> single;
};

PointResult run_point(const ScenarioConfig& scenario, const DropRegion& region, double isd_m,
                      std::size_t point_index, std::size_t drops, bool network_arm,
                      bool single_arm, const PropagationModel& model, const RunOptions& options,
                      bool edp_only = false) {
  Deployment deployment;
  try {
    deployment = generate_hex_deployment(region, isd_m, scenario.bs_height_m, scenario.sensor.mode);
    if (network_arm) {
      const std::size_t sensors =
          deployment.size() * (scenario.per_sector_fusion && scenario.sensor.mode ==
                                                                 AntennaMode::tri_sector
                                   ? 3
                                   : 1);
      scenario.slots.validate_for(sensors);
    }
  } catch (const std::exception& e) {
    throw SimulationError(isd_m, 0, e.what());
  }

  std::vector<DropOutcome> outcomes(drops);
  parallel_for(drops, options.workers, [&](std::size_t d) {
    try {
      const DropStreams streams{scenario.seed, point_index, d};
      outcomes[d] = run_drop(scenario, deployment, region, model, streams, network_arm, single_arm,
                             edp_only);
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError(isd_m, d, e.what());
    }
  });

  PointResult result;
  result.site_count = deployment.size();
  auto collect = [&](auto member) {
    std::vector<MetricsReport> reports;
    reports.reserve(drops);
    for (const auto& o : outcomes) reports.push_back(*(o.*member));
    return aggregate_over_drops(reports, scenario.weighting(), scenario.ci_method);
  };
  if (network_arm) result.network = collect(&DropOutcome::network);
  if (single_arm) result.single = collect(&DropOutcome::single);
  return result;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const Sweep& sweep, const RunOptions& options) {
  if (sweep.scenario == nullptr) throw std::invalid_argument("run_sweep: no scenario");
  if (sweep.isd_values_m.empty()) throw std::invalid_argument("run_sweep: empty ISD list");
  if (sweep.drops_per_point < 1) throw std::invalid_argument("run_sweep: drops must be >= 1");
  for (double isd : sweep.isd_values_m) {
    if (!(isd > 0.0)) throw std::invalid_argument("run_sweep: ISD values must be positive");
  }
  const ScenarioConfig& scenario = *sweep.scenario;
  const auto model = make_propagation_model(scenario.propagation);
  const DropRegion region = DropRegion::square(scenario.area.side_length_m);
  const bool network_arm = sweep.comparison_mode != ComparisonMode::single_center;
  const bool single_arm = sweep.comparison_mode != ComparisonMode::network;

  std::vector<SweepPoint> points;
  for (std::size_t p = 0; p < sweep.isd_values_m.size(); ++p) {
    const double isd = sweep.isd_values_m[p];
    if (isd > scenario.area.side_length_m) {
      throw SimulationError(isd, 0, "ISD exceeds area side length");
    }
    PointResult r = run_point(scenario, region, isd, p, sweep.drops_per_point, network_arm,
                              single_arm, *model, options);
    SweepPoint point{isd, p, r.site_count, std::move(r.network), std::move(r.single)};
    if (options.progress != nullptr) {
      *options.progress << "sweep: ISD " << isd << " m, " << point.site_count << " sites, "
                        << sweep.drops_per_point << " drops";
      if (point.network) *options.progress << ", EDP " << point.network->edp;
      if (point.single) *options.progress << ", single EDP " << point.single->edp;
      *options.progress << '\n';
    }
    points.push_back(std::move(point));
  }
  return points;
}

std::vector<ComparisonRow> run_single_vs_network(const std::vector<double>& city_areas_km2,
                                                 const std::vector<double>& isd_values_m,
                                                 std::size_t drops, const ScenarioConfig& scenario,
                                                 const RunOptions& options) {
  if (city_areas_km2.empty() || isd_values_m.empty()) {
    throw std::invalid_argument("compare: city and ISD lists must be non-empty");
  }
  if (drops < 1) throw std::invalid_argument("compare: drops must be >= 1");
  const auto model = make_propagation_model(scenario.propagation);
  std::vector<ComparisonRow> rows;
  for (std::size_t c = 0; c < city_areas_km2.size(); ++c) {
    const DropRegion region = DropRegion::disk_with_area(city_areas_km2[c] * 1e6);
    for (std::size_t i = 0; i < isd_values_m.size(); ++i) {
      const std::size_t point_index = c * isd_values_m.size() + i;
      PointResult r = run_point(scenario, region, isd_values_m[i], point_index, drops, true, true,
                                *model, options, true);
      ComparisonRow row;
      row.city_area_km2 = city_areas_km2[c];
      row.isd_m = isd_values_m[i];
      row.site_count = r.site_count;
      row.network = std::move(*r.network);
      row.single = std::move(*r.single);
      row.drops = drops;
      row.seed = scenario.seed;
      if (options.progress != nullptr) {
        *options.progress << "compare: " << row.city_area_km2 << " km2, ISD " << row.isd_m
                          << " m, " << row.site_count << " sites, EDP network "
                          << row.network.edp << " single " << row.single.edp << '\n';
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

DensityResult find_min_density(const ScenarioConfig& scenario, double edp_target,
                               const std::vector<double>& isd_grid, SearchStrategy strategy,
                               const RunOptions& options) {
  if (isd_grid.empty()) throw std::invalid_argument("find_min_density: empty ISD grid");
  if (!std::is_sorted(isd_grid.begin(), isd_grid.end())) {
    throw std::invalid_argument("find_min_density: ISD grid must be sorted ascending");
  }
  if (!(edp_target >= 0.0 && edp_target <= 1.0)) {
    throw std::invalid_argument("find_min_density: target must be in [0, 1]");
  }
  const auto model = make_propagation_model(scenario.propagation);
  const DropRegion region = DropRegion::square(scenario.area.side_length_m);
  DensityResult result;
  std::map<std::size_t, double> cache;
  auto edp_at = [&](std::size_t idx) {
    if (auto it = cache.find(idx); it != cache.end()) return it->second;
    const PointResult r = run_point(scenario, region, isd_grid[idx], idx, scenario.drops, true,
                                    false, *model, options);
    const double edp = r.network->edp;
    cache.emplace(idx, edp);
    result.evaluated.emplace_back(isd_grid[idx], edp);
    return edp;
  };

  std::optional<std::size_t> best;
  if (strategy == SearchStrategy::linear_scan) {
    for (std::size_t i = 0; i < isd_grid.size(); ++i) {
      if (edp_at(i) >= edp_target) best = i;
    }
  } else {
    // Assumes EDP is non-increasing along the grid.
    std::size_t lo = 0;
    std::size_t hi = isd_grid.size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (edp_at(mid) >= edp_target) {
        best = mid;
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
  }
  if (best) {
    result.isd_m = isd_grid[*best];
    result.site_fraction = sensing_site_fraction(*result.isd_m);
  }
  return result;
}

}  // namespace larsnet
