#include "larsnet/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "larsnet/output.hpp"
#include "larsnet/sensing.hpp"

namespace larsnet {

using nlohmann::json;

namespace fs = std::filesystem;

std::vector<double> parse_number_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError(flag + ": empty list element");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(flag + ": list must not be empty");
  return values;
}

namespace {

std::string num(double v) {
  if (v != v) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

json num_json(double v) { return v == v ? json(v) : json(nullptr); }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json report_json(const MetricsReport& r) {
  return {{"edp", num_json(r.edp)},         {"edp_ci", num_json(r.edp_ci)},
          {"tdp", num_json(r.tdp)},         {"tdp_ci", num_json(r.tdp_ci)},
          {"tmp_on", num_json(r.tmp_on)},   {"tmp_abs", num_json(r.tmp_abs)},
          {"tmp_abs_ci", num_json(r.tmp_abs_ci)},
          {"n_on_total", r.n_on},           {"total_slots", r.total_slots},
          {"drops", r.drops},               {"drops_without_on", r.drops_without_on}};
}

json provenance_block(const ScenarioConfig& config, const json& overrides) {
  return {{"provenance_hash", provenance_hash(config)},
          {"code_version", LARSNET_VERSION},
          {"propagation_model", config.propagation.model},
          {"psd_sign_paper_literal", config.link.psd_sign_paper_literal},
          {"fusion", config.per_sector_fusion ? "per_sector" : "per_site"},
          {"aggregation", config.pooled_metrics ? "pooled" : "equal_drop_weight"},
          {"num_slots", config.slots.num_slots},
          {"drops", config.drops},
          {"seed", config.seed},
          {"overrides", overrides},
          {"applied_defaults", config.applied_defaults},
          {"config", to_json(config)}};
}

}  // namespace

std::string sweep_csv(const std::vector<SweepPoint>& points, const ScenarioConfig& config,
                      bool single_arm) {
  const std::string hash = provenance_hash(config);
  std::ostringstream os;
  os << "isd_m,edp,edp_ci,tdp,tdp_ci,tmp_on,tmp_abs,drops,n_on_total,seed,provenance_hash\n";
  for (const auto& p : points) {
    const auto& maybe = single_arm ? p.single : p.network;
    if (!maybe) continue;
    const MetricsReport& r = *maybe;
    os << num(p.isd_m) << ',' << num(r.edp) << ',' << num(r.edp_ci) << ',' << num(r.tdp) << ','
       << num(r.tdp_ci) << ',' << num(r.tmp_on) << ',' << num(r.tmp_abs) << ',' << r.drops << ','
       << r.n_on << ',' << config.seed << ',' << hash << '\n';
  }
  return os.str();
}

std::string compare_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "city_area_km2,isd_m,edp_network,edp_single,drops,seed\n";
  for (const auto& r : rows) {
    os << num(r.city_area_km2) << ',' << num(r.isd_m) << ',' << num(r.network.edp) << ','
       << num(r.single.edp) << ',' << r.drops << ',' << r.seed << '\n';
  }
  return os.str();
}

CommandResult sweep_command(const ScenarioConfig& config, const fs::path& output_dir,
                            const json& overrides, const RunOptions& options) {
  fs::create_directories(output_dir);
  Sweep sweep{config.isd_m, config.drops, &config, config.comparison_mode};
  const auto points = run_sweep(sweep, options);

  CommandResult result;
  json rows = json::array();
  for (const auto& p : points) {
    json row = {{"isd_m", p.isd_m}, {"site_count", p.site_count},
                {"sensing_site_fraction", sensing_site_fraction(p.isd_m)}};
    if (p.network) row["network"] = report_json(*p.network);
    if (p.single) row["single_center"] = report_json(*p.single);
    rows.push_back(row);
  }
  if (config.comparison_mode != ComparisonMode::single_center) {
    const fs::path csv = output_dir / "sweep.csv";
    write_file(csv, sweep_csv(points, config, false));
    result.files.push_back(csv);
  }
  if (config.comparison_mode != ComparisonMode::network) {
    const fs::path csv = output_dir / "sweep_single.csv";
    write_file(csv, sweep_csv(points, config, true));
    result.files.push_back(csv);
  }
  result.summary = provenance_block(config, overrides);
  result.summary["command"] = "sweep";
  result.summary["rows"] = rows;
  const fs::path summary = output_dir / "sweep.json";
  write_file(summary, result.summary.dump(2) + "\n");
  result.files.push_back(summary);
  return result;
}

CommandResult compare_command(const ScenarioConfig& config, const fs::path& output_dir,
                              const json& overrides, const RunOptions& options) {
  fs::create_directories(output_dir);
  const auto rows =
      run_single_vs_network(config.city_areas_km2, config.isd_m, config.drops, config, options);
  CommandResult result;
  const fs::path csv = output_dir / "compare.csv";
  write_file(csv, compare_csv(rows));
  result.files.push_back(csv);
  json jrows = json::array();
  for (const auto& r : rows) {
    jrows.push_back({{"city_area_km2", r.city_area_km2},
                     {"isd_m", r.isd_m},
                     {"site_count", r.site_count},
                     {"network", report_json(r.network)},
                     {"single_center", report_json(r.single)}});
  }
  result.summary = provenance_block(config, overrides);
  result.summary["command"] = "compare";
  result.summary["rows"] = jrows;
  const fs::path summary = output_dir / "compare.json";
  write_file(summary, result.summary.dump(2) + "\n");
  result.files.push_back(summary);
  return result;
}

CommandResult heatmap_command(const ScenarioConfig& config, const fs::path& output_dir,
                              const json& overrides, const RunOptions& options) {
  fs::create_directories(output_dir);
  const auto model = make_propagation_model(config.propagation);
  const double isd = config.isd_m.front();
  const Deployment deployment =
      generate_hex_deployment(config.area, isd, config.bs_height_m, config.sensor.mode);
  const DropStreams streams{config.seed, 0, 0};

  IncumbentDrop incumbent;
  if (config.heatmap.incumbent) {
    incumbent = {config.heatmap.incumbent->x_m, config.heatmap.incumbent->y_m,
                 config.incumbent_height_m, config.heatmap.incumbent->azimuth_deg};
  } else {
    Engine stream = streams.stream(StreamKind::incumbent);
    incumbent = drop_incumbent(DropRegion::square(config.area.side_length_m),
                               config.incumbent_height_m, stream);
  }
  const Emitter emitter{config.dish, incumbent};
  const Provenance provenance{provenance_hash(config), model->id()};

  GridOptions grid_options;
  grid_options.mode = config.heatmap.mode;
  grid_options.probe = config.heatmap.probe;
  grid_options.idw_power = config.heatmap.idw_power;
  grid_options.seed = config.seed;
  grid_options.workers = options.workers;
  const PowerGrid grid =
      compute_power_grid(config.area, deployment, emitter, config.sensor, config.link, *model,
                         config.heatmap.resolution, grid_options, options.progress);

  CommandResult result;
  const fs::path grid_csv = output_dir / "grid.csv";
  {
    std::ofstream out(grid_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + grid_csv.string());
    write_grid_csv(out, grid);
  }
  const fs::path heatmap_png = output_dir / "heatmap.png";
  render_heatmap(grid, deployment, incumbent, heatmap_png,
                 {config.heatmap.color_min_dbm_per_mhz, config.heatmap.color_max_dbm_per_mhz},
                 provenance);

  const auto indicators =
      site_indicators(deployment, emitter, config.sensor, config.link, *model, streams);
  const fs::path threshold_png = output_dir / "threshold_map.png";
  render_threshold_map(config.area, deployment, indicators, incumbent, threshold_png, provenance);

  const Eigen::ArrayXXd table =
      sector_psd_table(deployment, emitter, config.sensor, config.link, *model, streams);
  const SlotTrace trace =
      simulate_slots(make_sensor_set(deployment, table, config.fusion_unit()),
                     config.link.threshold_dbm_per_mhz, config.link.noise_sigma_db, config.slots,
                     streams);
  const fs::path trace_csv = output_dir / "trace.csv";
  {
    std::ofstream out(trace_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + trace_csv.string());
    write_trace_csv(out, trace);
  }

  std::filesystem::path legend = heatmap_png;
  legend.replace_extension(".legend.json");
  result.files = {grid_csv, heatmap_png, legend, threshold_png, trace_csv};
  const auto count = std::count(indicators.begin(), indicators.end(), std::uint8_t{1});
  result.summary = provenance_block(config, overrides);
  result.summary["command"] = "heatmap";
  result.summary["isd_m"] = isd;
  result.summary["site_count"] = deployment.size();
  result.summary["indicator_count"] = count;
  result.summary["incumbent"] = {{"x_m", incumbent.x_m},
                                 {"y_m", incumbent.y_m},
                                 {"height_m", incumbent.height_m},
                                 {"boresight_azimuth_deg", incumbent.boresight_azimuth_deg}};
  result.summary["drop_metrics"] = report_json(summarize_trace(trace, config.ci_method));
  const fs::path summary = output_dir / "heatmap.json";
  write_file(summary, result.summary.dump(2) + "\n");
  result.files.push_back(summary);
  return result;
}

CommandResult density_command(const ScenarioConfig& config, double edp_target,
                              const fs::path& output_dir, const json& overrides,
                              const RunOptions& options) {
  fs::create_directories(output_dir);
  std::vector<double> grid = config.isd_m;
  std::sort(grid.begin(), grid.end());
  const DensityResult r = find_min_density(config, edp_target, grid, SearchStrategy::linear_scan,
                                           options);
  CommandResult result;
  result.summary = provenance_block(config, overrides);
  result.summary["command"] = "density";
  result.summary["edp_target"] = edp_target;
  result.summary["max_isd_m"] = r.isd_m ? json(*r.isd_m) : json(nullptr);
  result.summary["sensing_site_fraction"] = r.site_fraction ? json(*r.site_fraction) : json(nullptr);
  json evaluated = json::array();
  for (const auto& [isd, edp] : r.evaluated) evaluated.push_back({{"isd_m", isd}, {"edp", edp}});
  result.summary["evaluated"] = evaluated;
  const fs::path summary = output_dir / "density.json";
  write_file(summary, result.summary.dump(2) + "\n");
  result.files.push_back(summary);
  return result;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo simulator for network-level spectrum sensing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LARSNET_VERSION);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> isd_list;
  std::optional<std::string> output;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> resolution;
  std::optional<std::size_t> drops;
  std::optional<std::string> areas;
  std::optional<double> inc_x, inc_y, inc_az;
  double target = 0.9;
  bool quiet = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario config (JSON)")->required();
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--isd", isd_list, "Comma-separated ISD list in metres");
    sub->add_option("--output", output, "Output directory (fallback: $LARSNET_OUTPUT_DIR)");
    sub->add_option("--workers", workers, "Worker threads (0 = all cores)");
    sub->add_option("--drops", drops, "Incumbent drops per point");
    sub->add_flag("--quiet", quiet, "Suppress progress output");
  };
  CLI::App* sweep = app.add_subcommand("sweep", "EDP/TDP/TMP versus ISD");
  common(sweep);
  CLI::App* heatmap = app.add_subcommand("heatmap", "Received-power heatmap and threshold map");
  common(heatmap);
  heatmap->add_option("--resolution", resolution, "Grid points per axis");
  heatmap->add_option("--incumbent-x", inc_x, "Incumbent x (m)");
  heatmap->add_option("--incumbent-y", inc_y, "Incumbent y (m)");
  heatmap->add_option("--incumbent-azimuth", inc_az, "Incumbent boresight azimuth (deg)");
  CLI::App* compare = app.add_subcommand("compare", "Network versus centre sensor over disks");
  common(compare);
  compare->add_option("--areas", areas, "Comma-separated city areas in km^2");
  CLI::App* density = app.add_subcommand("density", "Largest ISD meeting an EDP target");
  common(density);
  density->add_option("--target", target, "EDP target")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  ScenarioConfig config;
  json overrides = json::object();
  fs::path output_dir;
  try {
    config = load_config(config_path);
    if (seed) {
      config.seed = *seed;
      overrides["seed"] = *seed;
    }
    if (isd_list) {
      config.isd_m = parse_number_list(*isd_list, "--isd");
      overrides["isd_m"] = config.isd_m;
    }
    if (drops) {
      if (*drops < 1) throw UsageError("--drops must be >= 1");
      config.drops = *drops;
      overrides["drops"] = *drops;
    }
    if (workers) {
      config.workers = *workers;
      overrides["workers"] = *workers;
    }
    if (resolution) {
      if (*resolution < 2) throw UsageError("--resolution must be >= 2");
      config.heatmap.resolution = *resolution;
      overrides["resolution"] = *resolution;
    }
    if (areas) {
      config.city_areas_km2 = parse_number_list(*areas, "--areas");
      overrides["city_areas_km2"] = config.city_areas_km2;
    }
    if (inc_x || inc_y || inc_az) {
      IncumbentOverride o = config.heatmap.incumbent.value_or(IncumbentOverride{});
      if (inc_x) o.x_m = *inc_x;
      if (inc_y) o.y_m = *inc_y;
      if (inc_az) o.azimuth_deg = wrap_azimuth_deg(*inc_az);
      config.heatmap.incumbent = o;
      overrides["incumbent"] = {{"x_m", o.x_m}, {"y_m", o.y_m}, {"azimuth_deg", o.azimuth_deg}};
    }
    config.validate();
    if (output) {
      output_dir = *output;
    } else if (const char* env = std::getenv("LARSNET_OUTPUT_DIR"); env != nullptr && *env) {
      output_dir = env;
    } else {
      output_dir = config.output_dir;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  RunOptions options;
  options.workers = config.workers;
  options.progress = quiet ? nullptr : &err;
  try {
    CommandResult result;
    if (sweep->parsed()) {
      result = sweep_command(config, output_dir, overrides, options);
    } else if (heatmap->parsed()) {
      result = heatmap_command(config, output_dir, overrides, options);
    } else if (compare->parsed()) {
      result = compare_command(config, output_dir, overrides, options);
    } else {
      result = density_command(config, target, output_dir, overrides, options);
    }
    for (const auto& f : result.files) out << f.string() << '\n';
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace larsnet
