#include "larsnet/config.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace larsnet {

using nlohmann::json;

std::string to_string(AntennaMode mode) {
  return mode == AntennaMode::tri_sector ? "tri_sector" : "omni";
}
std::string to_string(GridMode mode) {
  return mode == GridMode::dense_field ? "dense_field" : "site_interpolated";
}
std::string to_string(ProbeAntenna probe) {
  return probe == ProbeAntenna::isotropic ? "isotropic" : "sensor_pattern";
}
std::string to_string(ComparisonMode mode) {
  switch (mode) {
    case ComparisonMode::network: return "network";
    case ComparisonMode::single_center: return "single_center";
    case ComparisonMode::both: return "both";
  }
  return "network";
}
std::string to_string(CiMethod method) {
  return method == CiMethod::normal ? "normal" : "clopper_pearson";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <typename Enum>
Enum parse_enum(const std::string& key, const std::string& text,
                std::initializer_list<std::pair<const char*, Enum>> options) {
  std::string accepted;
  for (const auto& [name, value] : options) {
    if (text == name) return value;
    accepted += accepted.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(key, "unknown value '" + text + "' (expected one of: " + accepted + ")");
}

// Reads one JSON object, applying defaults for absent keys and rejecting
// keys nobody asked for.
class Section {
 public:
  Section(const json& node, std::string path, std::vector<std::string>& defaults)
      : path_(std::move(path)), defaults_(defaults) {
    if (node.is_null()) {
      node_ = json::object();
    } else if (!node.is_object()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    } else {
      node_ = node;
    }
  }

  [[nodiscard]] std::string key(const std::string& name) const {
    return path_.empty() ? name : path_ + "." + name;
  }

  [[nodiscard]] const json* find(const std::string& name) {
    seen_.insert(name);
    auto it = node_.find(name);
    if (it == node_.end()) {
      defaults_.push_back(key(name));
      return nullptr;
    }
    return &*it;
  }

  Section child(const std::string& name) {
    const json* node = find(name);
    if (node == nullptr) return {json(nullptr), key(name), defaults_};
    return {*node, key(name), defaults_};
  }

  void number(const std::string& name, double& out,
              const std::function<bool(double)>& ok = nullptr, const char* constraint = "") {
    const json* v = find(name);
    if (v != nullptr) {
      if (!v->is_number()) throw ConfigError(key(name), "expected a number");
      out = v->get<double>();
    }
    if (!std::isfinite(out)) throw ConfigError(key(name), "must be finite");
    if (ok && !ok(out)) throw ConfigError(key(name), std::string(constraint) + ", got " + fmt(out));
  }

  template <typename Int>
  void integer(const std::string& name, Int& out, const std::function<bool(Int)>& ok = nullptr,
               const char* constraint = "") {
    const json* v = find(name);
    if (v != nullptr) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                      v->get<std::int64_t>() < 0)) {
        throw ConfigError(key(name), "expected a non-negative integer");
      }
      out = v->get<Int>();
    }
    if (ok && !ok(out)) {
      throw ConfigError(key(name), std::string(constraint) + ", got " + std::to_string(out));
    }
  }

  void boolean(const std::string& name, bool& out) {
    const json* v = find(name);
    if (v == nullptr) return;
    if (!v->is_boolean()) throw ConfigError(key(name), "expected true or false");
    out = v->get<bool>();
  }

  void string(const std::string& name, std::string& out) {
    const json* v = find(name);
    if (v == nullptr) return;
    if (!v->is_string()) throw ConfigError(key(name), "expected a string");
    out = v->get<std::string>();
  }

  void number_list(const std::string& name, std::vector<double>& out,
                   const std::function<bool(double)>& ok, const char* constraint) {
    const json* v = find(name);
    if (v != nullptr) {
      if (!v->is_array()) throw ConfigError(key(name), "expected a list of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError(key(name), "expected a list of numbers");
        out.push_back(e.get<double>());
      }
    }
    if (out.empty()) throw ConfigError(key(name), "list must not be empty");
    for (double x : out) {
      if (!std::isfinite(x) || !ok(x)) {
        throw ConfigError(key(name), std::string(constraint) + ", got " + fmt(x));
      }
    }
  }

  void finish() const {
    for (const auto& [name, value] : node_.items()) {
      if (!seen_.contains(name)) throw ConfigError(key(name), "unknown key");
    }
  }

 private:
  json node_;
  std::string path_;
  std::vector<std::string>& defaults_;
  std::set<std::string> seen_;
};

const auto positive = [](double v) { return v > 0.0; };
const auto non_negative = [](double v) { return v >= 0.0; };
const auto unit_interval = [](double v) { return v >= 0.0 && v <= 1.0; };
const auto beamwidth = [](double v) { return v > 0.0 && v <= 180.0; };
const auto any_value = [](double) { return true; };

}  // namespace

void ScenarioConfig::validate() const {
  // Cross-field constraints that a single key cannot express.
  for (double isd : isd_m) {
    if (isd > area.side_length_m) {
      throw ConfigError("deployment.isd_m", "ISD " + fmt(isd) + " exceeds area side length");
    }
  }
  if (link.incumbent_max_gain_dbi != dish.max_gain_dbi) {
    throw ConfigError("incumbent.max_gain_dbi", "link budget and dish disagree on peak gain");
  }
  if (!(heatmap.color_min_dbm_per_mhz < heatmap.color_max_dbm_per_mhz)) {
    throw ConfigError("heatmap.color_max_dbm_per_mhz", "must exceed color_min_dbm_per_mhz");
  }
  if (!has_propagation_model(propagation.model)) {
    throw ConfigError("propagation.model", "unknown model '" + propagation.model + "'");
  }
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return name == o.name && area.side_length_m == o.area.side_length_m && isd_m == o.isd_m &&
         bs_height_m == o.bs_height_m && sensor == o.sensor && propagation == o.propagation &&
         incumbent_height_m == o.incumbent_height_m && dish == o.dish && link == o.link &&
         slots == o.slots && drops == o.drops && seed == o.seed && workers == o.workers &&
         comparison_mode == o.comparison_mode && ci_method == o.ci_method &&
         city_areas_km2 == o.city_areas_km2 && heatmap == o.heatmap &&
         per_sector_fusion == o.per_sector_fusion && pooled_metrics == o.pooled_metrics &&
         output_dir == o.output_dir;
}

ScenarioConfig parse_config(const json& document) {
  ScenarioConfig c;
  std::vector<std::string> defaults;
  Section root(document, "", defaults);
  root.string("name", c.name);
  root.string("output_dir", c.output_dir);

  {
    Section s = root.child("area");
    s.number("side_length_m", c.area.side_length_m, positive, "must be > 0");
    s.finish();
  }
  {
    Section s = root.child("deployment");
    s.number_list("isd_m", c.isd_m, positive, "every ISD must be > 0");
    s.number("bs_height_m", c.bs_height_m, non_negative, "must be >= 0");
    std::string mode = to_string(c.sensor.mode);
    s.string("antenna_mode", mode);
    c.sensor.mode = parse_enum<AntennaMode>(
        s.key("antenna_mode"), mode,
        {{"tri_sector", AntennaMode::tri_sector}, {"omni", AntennaMode::omni}});
    s.finish();
  }
  {
    Section s = root.child("sector_antenna");
    auto& p = c.sensor.sector;
    s.number("max_gain_dbi", p.max_gain_dbi, any_value);
    s.number("h_hpbw_deg", p.h_hpbw_deg, beamwidth, "must be in (0, 180]");
    s.number("v_hpbw_deg", p.v_hpbw_deg, beamwidth, "must be in (0, 180]");
    s.number("front_to_back_db", p.front_to_back_db, positive, "must be > 0");
    s.number("sidelobe_floor_db", p.sidelobe_floor_db, positive, "must be > 0");
    s.number("electrical_downtilt_deg", p.electrical_downtilt_deg,
             [](double v) { return v >= -90.0 && v <= 90.0; }, "must be in [-90, 90]");
    s.finish();
  }
  {
    Section s = root.child("omni_antenna");
    auto& p = c.sensor.omni;
    s.number("max_gain_dbi", p.max_gain_dbi, any_value);
    s.number("v_hpbw_deg", p.v_hpbw_deg, beamwidth, "must be in (0, 180]");
    s.number("sidelobe_floor_db", p.sidelobe_floor_db, positive, "must be > 0");
    s.finish();
  }
  {
    Section s = root.child("incumbent");
    s.number("eirp_max_dbm", c.link.eirp_max_dbm, any_value);
    s.number("height_m", c.incumbent_height_m, non_negative, "must be >= 0");
    s.number("max_gain_dbi", c.dish.max_gain_dbi, any_value);
    c.link.incumbent_max_gain_dbi = c.dish.max_gain_dbi;
    s.number("hpbw_deg", c.dish.hpbw_deg, beamwidth, "must be in (0, 180]");
    s.number("front_to_back_db", c.dish.front_to_back_db, positive, "must be > 0");
    s.number("boresight_elevation_deg", c.dish.boresight_elevation_deg,
             [](double v) { return v >= -90.0 && v <= 90.0; }, "must be in [-90, 90]");
    s.finish();
  }
  {
    Section s = root.child("link");
    s.number("frequency_hz", c.link.frequency_hz, positive, "must be > 0");
    s.number("bandwidth_hz", c.link.bandwidth_hz, [](double v) { return v >= 1e6; },
             "must be >= 1 MHz");
    s.number("threshold_dbm_per_mhz", c.link.threshold_dbm_per_mhz, any_value);
    s.number("noise_sigma_db", c.link.noise_sigma_db, non_negative, "must be >= 0");
    s.finish();
  }
  {
    Section s = root.child("propagation");
    s.string("model", c.propagation.model);
    s.number("exponent", c.propagation.exponent, [](double v) { return v >= 2.0; },
             "must be >= 2");
    s.number("shadowing_sigma_db", c.propagation.shadowing_sigma_db, non_negative,
             "must be >= 0");
    s.finish();
  }
  {
    Section s = root.child("slots");
    s.integer<std::size_t>("num_slots", c.slots.num_slots, [](std::size_t v) { return v >= 1; },
                           "must be >= 1");
    s.number("p_on", c.slots.p_on, unit_interval, "must be in [0, 1]");
    s.number("duty_cycle", c.slots.duty_cycle, unit_interval, "must be in [0, 1]");
    s.integer<std::size_t>("fusion_k", c.slots.fusion_k, [](std::size_t v) { return v >= 1; },
                           "must be >= 1");
    s.finish();
  }
  {
    Section s = root.child("montecarlo");
    s.integer<std::size_t>("drops", c.drops, [](std::size_t v) { return v >= 1; },
                           "must be >= 1");
    s.integer<std::uint64_t>("seed", c.seed);
    s.integer<std::size_t>("workers", c.workers);
    std::string mode = to_string(c.comparison_mode);
    s.string("comparison_mode", mode);
    c.comparison_mode = parse_enum<ComparisonMode>(s.key("comparison_mode"), mode,
                                                   {{"network", ComparisonMode::network},
                                                    {"single_center", ComparisonMode::single_center},
                                                    {"both", ComparisonMode::both}});
    std::string ci = to_string(c.ci_method);
    s.string("ci_method", ci);
    c.ci_method = parse_enum<CiMethod>(
        s.key("ci_method"), ci,
        {{"normal", CiMethod::normal}, {"clopper_pearson", CiMethod::clopper_pearson}});
    s.finish();
  }
  {
    Section s = root.child("compare");
    s.number_list("city_areas_km2", c.city_areas_km2, positive, "every area must be > 0");
    s.finish();
  }
  {
    Section s = root.child("heatmap");
    auto& h = c.heatmap;
    s.integer<std::size_t>("resolution", h.resolution, [](std::size_t v) { return v >= 2; },
                           "must be >= 2");
    std::string mode = to_string(h.mode);
    s.string("mode", mode);
    h.mode = parse_enum<GridMode>(s.key("mode"), mode,
                                  {{"dense_field", GridMode::dense_field},
                                   {"site_interpolated", GridMode::site_interpolated}});
    std::string probe = to_string(h.probe);
    s.string("probe", probe);
    h.probe = parse_enum<ProbeAntenna>(s.key("probe"), probe,
                                       {{"isotropic", ProbeAntenna::isotropic},
                                        {"sensor_pattern", ProbeAntenna::sensor_pattern}});
    s.number("color_min_dbm_per_mhz", h.color_min_dbm_per_mhz, any_value);
    s.number("color_max_dbm_per_mhz", h.color_max_dbm_per_mhz, any_value);
    s.number("idw_power", h.idw_power, positive, "must be > 0");
    const json* inc = s.find("incumbent");
    if (inc != nullptr && !inc->is_null()) {
      Section is(*inc, s.key("incumbent"), defaults);
      IncumbentOverride o;
      is.number("x_m", o.x_m, any_value);
      is.number("y_m", o.y_m, any_value);
      is.number("azimuth_deg", o.azimuth_deg, any_value);
      o.azimuth_deg = wrap_azimuth_deg(o.azimuth_deg);
      is.finish();
      h.incumbent = o;
    }
    s.finish();
  }
  {
    Section s = root.child("flags");
    s.boolean("psd_sign_paper_literal", c.link.psd_sign_paper_literal);
    s.boolean("per_sector_fusion", c.per_sector_fusion);
    s.boolean("pooled_metrics", c.pooled_metrics);
    s.finish();
  }
  root.finish();
  c.validate();
  c.applied_defaults = std::move(defaults);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("parse error: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["output_dir"] = c.output_dir;
  j["area"] = {{"side_length_m", c.area.side_length_m}};
  j["deployment"] = {{"isd_m", c.isd_m},
                     {"bs_height_m", c.bs_height_m},
                     {"antenna_mode", to_string(c.sensor.mode)}};
  const auto& sp = c.sensor.sector;
  j["sector_antenna"] = {{"max_gain_dbi", sp.max_gain_dbi},
                         {"h_hpbw_deg", sp.h_hpbw_deg},
                         {"v_hpbw_deg", sp.v_hpbw_deg},
                         {"front_to_back_db", sp.front_to_back_db},
                         {"sidelobe_floor_db", sp.sidelobe_floor_db},
                         {"electrical_downtilt_deg", sp.electrical_downtilt_deg}};
  const auto& op = c.sensor.omni;
  j["omni_antenna"] = {{"max_gain_dbi", op.max_gain_dbi},
                       {"v_hpbw_deg", op.v_hpbw_deg},
                       {"sidelobe_floor_db", op.sidelobe_floor_db}};
  j["incumbent"] = {{"eirp_max_dbm", c.link.eirp_max_dbm},
                    {"height_m", c.incumbent_height_m},
                    {"max_gain_dbi", c.dish.max_gain_dbi},
                    {"hpbw_deg", c.dish.hpbw_deg},
                    {"front_to_back_db", c.dish.front_to_back_db},
                    {"boresight_elevation_deg", c.dish.boresight_elevation_deg}};
  j["link"] = {{"frequency_hz", c.link.frequency_hz},
               {"bandwidth_hz", c.link.bandwidth_hz},
               {"threshold_dbm_per_mhz", c.link.threshold_dbm_per_mhz},
               {"noise_sigma_db", c.link.noise_sigma_db}};
  j["propagation"] = {{"model", c.propagation.model},
                      {"exponent", c.propagation.exponent},
                      {"shadowing_sigma_db", c.propagation.shadowing_sigma_db}};
  j["slots"] = {{"num_slots", c.slots.num_slots},
                {"p_on", c.slots.p_on},
                {"duty_cycle", c.slots.duty_cycle},
                {"fusion_k", c.slots.fusion_k}};
  j["montecarlo"] = {{"drops", c.drops},
                     {"seed", c.seed},
                     {"workers", c.workers},
                     {"comparison_mode", to_string(c.comparison_mode)},
                     {"ci_method", to_string(c.ci_method)}};
  j["compare"] = {{"city_areas_km2", c.city_areas_km2}};
  const auto& h = c.heatmap;
  j["heatmap"] = {{"resolution", h.resolution},
                  {"mode", to_string(h.mode)},
                  {"probe", to_string(h.probe)},
                  {"color_min_dbm_per_mhz", h.color_min_dbm_per_mhz},
                  {"color_max_dbm_per_mhz", h.color_max_dbm_per_mhz},
                  {"idw_power", h.idw_power},
                  {"incumbent", nullptr}};
  if (h.incumbent) {
    j["heatmap"]["incumbent"] = {{"x_m", h.incumbent->x_m},
                                 {"y_m", h.incumbent->y_m},
                                 {"azimuth_deg", h.incumbent->azimuth_deg}};
  }
  j["flags"] = {{"psd_sign_paper_literal", c.link.psd_sign_paper_literal},
                {"per_sector_fusion", c.per_sector_fusion},
                {"pooled_metrics", c.pooled_metrics}};
  return j;
}

std::string provenance_hash(const ScenarioConfig& config, const std::string& code_version) {
  json j = to_json(config);
  j.erase("output_dir");
  j["montecarlo"].erase("workers");
  const std::string payload = j.dump() + "|" + code_version;

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(payload.data(), payload.size(), digest, &length, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < 8 && i < length; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

}  // namespace larsnet
