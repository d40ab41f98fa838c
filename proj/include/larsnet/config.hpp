#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "larsnet/antennas.hpp"
#include "larsnet/geometry.hpp"
#include "larsnet/link.hpp"
#include "larsnet/metrics.hpp"
#include "larsnet/propagation.hpp"
#include "larsnet/sensing.hpp"

namespace larsnet {

// Raised for malformed or out-of-range configuration; `key` is the dotted
// path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class GridMode { dense_field, site_interpolated };
enum class ProbeAntenna { isotropic, sensor_pattern };
enum class ComparisonMode { network, single_center, both };

struct IncumbentOverride {
  double x_m = 0.0;
  double y_m = 0.0;
  double azimuth_deg = 0.0;
  bool operator==(const IncumbentOverride&) const = default;
};

struct HeatmapSettings {
  std::size_t resolution = 500;
  GridMode mode = GridMode::dense_field;
  ProbeAntenna probe = ProbeAntenna::isotropic;
  double color_min_dbm_per_mhz = -140.0;
  double color_max_dbm_per_mhz = -40.0;
  double idw_power = 2.0;
  std::optional<IncumbentOverride> incumbent;
  bool operator==(const HeatmapSettings&) const = default;
};

struct ScenarioConfig {
  std::string name = "paper_defaults";
  Area area;
  std::vector<double> isd_m{500.0, 1000.0, 1500.0, 2000.0, 2500.0, 3000.0};
  double bs_height_m = 25.0;
  SensorAntenna sensor;
  PropagationConfig propagation;
  double incumbent_height_m = 60.0;
  DishPatternd dish;
  LinkBudgetParams link;
  SlotModel slots;
  std::size_t drops = 2000;
  std::uint64_t seed = 20250101;
  std::size_t workers = 1;
  ComparisonMode comparison_mode = ComparisonMode::network;
  CiMethod ci_method = CiMethod::normal;
  std::vector<double> city_areas_km2{401.0, 71.0, 21.0};
  HeatmapSettings heatmap;
  bool per_sector_fusion = false;
  bool pooled_metrics = false;
  std::string output_dir = "out";

  // Dotted keys that were absent and took their default. Not part of equality.
  std::vector<std::string> applied_defaults;

  [[nodiscard]] FusionUnit fusion_unit() const {
    return per_sector_fusion ? FusionUnit::per_sector : FusionUnit::per_site;
  }
  [[nodiscard]] DropWeighting weighting() const {
    return pooled_metrics ? DropWeighting::by_n_on : DropWeighting::equal;
  }
  void validate() const;
  bool operator==(const ScenarioConfig& other) const;
};

ScenarioConfig parse_config(const nlohmann::json& document);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& config);

// Stable digest of everything that can change metric values (the output
// directory and worker count are excluded), plus the code version.
std::string provenance_hash(const ScenarioConfig& config,
                            const std::string& code_version = LARSNET_VERSION);

std::string to_string(AntennaMode mode);
std::string to_string(GridMode mode);
std::string to_string(ProbeAntenna probe);
std::string to_string(ComparisonMode mode);
std::string to_string(CiMethod method);

}  // namespace larsnet
