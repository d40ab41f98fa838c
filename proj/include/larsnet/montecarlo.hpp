#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "larsnet/config.hpp"
#include "larsnet/geometry.hpp"
#include "larsnet/metrics.hpp"

namespace larsnet {

// Failure inside a Monte Carlo work unit, tagged with its coordinates.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(double isd_m, std::size_t drop, const std::string& what)
      : std::runtime_error("ISD " + std::to_string(isd_m) + " m, drop " + std::to_string(drop) +
                           ": " + what),
        isd_m_(isd_m),
        drop_(drop) {}
  [[nodiscard]] double isd_m() const { return isd_m_; }
  [[nodiscard]] std::size_t drop() const { return drop_; }

 private:
  double isd_m_;
  std::size_t drop_;
};

struct RunOptions {
  std::size_t workers = 1;  // 0 = hardware concurrency
  std::ostream* progress = nullptr;
};

// Runs body(i) for i in [0, count) on up to `workers` threads. Exceptions are
// collected and the one from the lowest index is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

struct Sweep {
  std::vector<double> isd_values_m;
  std::size_t drops_per_point = 2000;
  const ScenarioConfig* scenario = nullptr;
  ComparisonMode comparison_mode = ComparisonMode::network;
};

struct SweepPoint {
  double isd_m = 0.0;
  std::size_t point_index = 0;
  std::size_t site_count = 0;
  std::optional<MetricsReport> network;
  std::optional<MetricsReport> single;
};

struct DropOutcome {
  IncumbentDrop incumbent;
  std::optional<MetricsReport> network;
  std::optional<MetricsReport> single;
};

// One incumbent drop over a prepared deployment. Both arms see the same
// incumbent and the same per-site noise and duty streams. With `edp_only` the
// duty cycle is not simulated and the duty-dependent fields are left NaN.
DropOutcome run_drop(const ScenarioConfig& scenario, const Deployment& deployment,
                     const DropRegion& region, const PropagationModel& model,
                     const DropStreams& streams, bool network_arm, bool single_arm,
                     bool edp_only = false);

std::vector<SweepPoint> run_sweep(const Sweep& sweep, const RunOptions& options = {});

struct ComparisonRow {
  double city_area_km2 = 0.0;
  double isd_m = 0.0;
  std::size_t site_count = 0;
  MetricsReport network;
  MetricsReport single;
  std::size_t drops = 0;
  std::uint64_t seed = 0;
};

// Disk footprints centred on the origin; sites are deployed inside each disk.
std::vector<ComparisonRow> run_single_vs_network(const std::vector<double>& city_areas_km2,
                                                 const std::vector<double>& isd_values_m,
                                                 std::size_t drops, const ScenarioConfig& scenario,
                                                 const RunOptions& options = {});

enum class SearchStrategy { linear_scan, binary_search };

struct DensityResult {
  std::optional<double> isd_m;
  std::optional<double> site_fraction;
  // (ISD, aggregated EDP) for every grid point actually simulated.
  std::vector<std::pair<double, double>> evaluated;
};

inline double sensing_site_fraction(double isd_m, double communication_isd_m = 500.0) {
  const double r = communication_isd_m / isd_m;
  return r * r;
}

DensityResult find_min_density(const ScenarioConfig& scenario, double edp_target,
                               const std::vector<double>& isd_grid,
                               SearchStrategy strategy = SearchStrategy::linear_scan,
                               const RunOptions& options = {});

}  // namespace larsnet
