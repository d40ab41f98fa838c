#include "larsnet/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "larsnet/montecarlo.hpp"
#include "larsnet/sensing.hpp"

namespace larsnet {

namespace {

double probe_gain(const PairGeometry& pair, const SensorAntenna& antenna, ProbeAntenna probe) {
  if (probe == ProbeAntenna::isotropic) return 0.0;
  if (antenna.mode == AntennaMode::omni) return antenna.gain_dbi(pair, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  for (double az : kTriSectorAzimuthsDeg) best = std::max(best, antenna.gain_dbi(pair, az));
  return best;
}

}  // namespace

PowerGrid compute_power_grid(const Area& area, const Deployment& deployment,
                             const Emitter& emitter, const SensorAntenna& antenna,
                             const LinkBudgetParams& link, const PropagationModel& model,
                             std::size_t resolution, const GridOptions& options,
                             std::ostream* warnings) {
  if (resolution < 2) throw std::invalid_argument("power grid: resolution must be >= 2");
  PowerGrid grid;
  grid.resolution = resolution;
  grid.half_extent_m = area.side_length_m / 2.0;
  const auto n = static_cast<Eigen::Index>(resolution);
  grid.psd.resize(n, n);
  if (warnings != nullptr &&
      !DropRegion::square(area.side_length_m).contains(emitter.drop.x_m, emitter.drop.y_m)) {
    *warnings << "warning: incumbent at (" << emitter.drop.x_m << ", " << emitter.drop.y_m
              << ") lies outside the simulation area\n";
  }
  const double h = deployment.sites.empty() ? 0.0 : deployment.sites.front().height_m;

  if (options.mode == GridMode::dense_field) {
    parallel_for(resolution, options.workers, [&](std::size_t row) {
      Engine stream = make_stream({options.seed, static_cast<std::uint64_t>(StreamKind::heatmap), row});
      for (std::size_t col = 0; col < resolution; ++col) {
        Eigen::Vector3d probe(grid.x_at(col), grid.y_at(row), h);
        if ((probe - emitter.drop.position()).norm() == 0.0) probe.x() += 1e-3;
        const PairGeometry pair = pair_geometry(emitter.drop.position(), probe);
        const double g_inc = dish_gain_toward(emitter.dish, emitter.drop.boresight_azimuth_deg,
                                              pair.azimuth_at_incumbent_deg, pair.elevation_deg);
        const double loss = model.path_loss_db(pair, link.frequency_hz, stream);
        const double prx = received_power(link, g_inc, loss, probe_gain(pair, antenna, options.probe));
        grid.psd(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
            to_psd(prx, link.bandwidth_hz, link.psd_sign_paper_literal);
      }
    });
    return grid;
  }

  if (deployment.sites.empty()) throw std::invalid_argument("power grid: no sites to interpolate");
  const DropStreams streams{options.seed, 0, 0};
  const Eigen::ArrayXXd table = sector_psd_table(deployment, emitter, antenna, link, model, streams);
  const Eigen::ArrayXd site_psd = table.colwise().maxCoeff().transpose();
  const Eigen::Matrix2Xd xy = deployment.xy();
  parallel_for(resolution, options.workers, [&](std::size_t row) {
    for (std::size_t col = 0; col < resolution; ++col) {
      const Eigen::Vector2d p(grid.x_at(col), grid.y_at(row));
      const Eigen::ArrayXd d2 = (xy.colwise() - p).colwise().squaredNorm().transpose().array();
      Eigen::Index nearest = 0;
      double value = 0.0;
      if (d2.minCoeff(&nearest) == 0.0) {
        value = site_psd(nearest);
      } else {
        const Eigen::ArrayXd w = d2.pow(-options.idw_power / 2.0);
        value = (w * site_psd).sum() / w.sum();
      }
      grid.psd(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = value;
    }
  });
  return grid;
}

void write_grid_csv(std::ostream& out, const PowerGrid& grid) {
  out << "x_m,y_m,psd_dbm_per_mhz\n";
  out << std::setprecision(17);
  for (std::size_t row = 0; row < grid.resolution; ++row) {
    for (std::size_t col = 0; col < grid.resolution; ++col) {
      out << grid.x_at(col) << ',' << grid.y_at(row) << ','
          << grid.psd(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) << '\n';
    }
  }
}

PowerGrid read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "x_m,y_m,psd_dbm_per_mhz") {
    throw std::runtime_error("grid csv: missing header");
  }
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 3> v{};
    std::istringstream ls(line);
    char comma = 0;
    if (!(ls >> v[0] >> comma >> v[1] >> comma >> v[2])) {
      throw std::runtime_error("grid csv: malformed row '" + line + "'");
    }
    rows.push_back(v);
  }
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(rows.size()))));
  if (n < 2 || n * n != rows.size()) throw std::runtime_error("grid csv: not a square grid");
  PowerGrid grid;
  grid.resolution = n;
  grid.half_extent_m = -rows.front()[0];
  grid.psd.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    grid.psd(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = rows[i][2];
  }
  return grid;
}

namespace {

// Area coordinates to pixel centres; y grows downward in the raster.
struct PixelMap {
  double half_extent_m;
  double pixels;
  [[nodiscard]] double px(double x_m) const {
    return (x_m + half_extent_m) / (2.0 * half_extent_m) * pixels;
  }
  [[nodiscard]] double py(double y_m) const {
    return (half_extent_m - y_m) / (2.0 * half_extent_m) * pixels;
  }
};

void draw_incumbent(Image& image, const PixelMap& map, const IncumbentDrop& incumbent) {
  const double size = static_cast<double>(std::max(image.width(), image.height()));
  const double cx = map.px(incumbent.x_m);
  const double cy = map.py(incumbent.y_m);
  const double length = 0.12 * size;
  const double az = deg_to_rad(incumbent.boresight_azimuth_deg);
  const Rgb red{220, 20, 20};
  draw_arrow(image, cx, cy, cx + length * std::cos(az), cy - length * std::sin(az),
             std::max(1.5, size / 300.0), red);
  draw_star(image, cx, cy, std::max(5.0, size / 45.0), red);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

Image heatmap_image(const PowerGrid& grid, const Deployment& deployment,
                    const IncumbentDrop& incumbent, const ColorScale& scale) {
  const std::size_t n = grid.resolution;
  Image image(n, n);
  const double span = scale.max_dbm_per_mhz - scale.min_dbm_per_mhz;
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      const double v = grid.psd(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
      image.set(col, n - 1 - row, colormap((v - scale.min_dbm_per_mhz) / span));
    }
  }
  // Pixel k is centred on grid coordinate k.
  const PixelMap map{grid.half_extent_m * static_cast<double>(n) / static_cast<double>(n - 1),
                     static_cast<double>(n)};
  const double radius = std::max(1.5, static_cast<double>(n) / 200.0);
  for (const auto& site : deployment.sites) {
    image.fill_disk(map.px(site.x_m), map.py(site.y_m), radius, {0, 0, 0});
  }
  draw_incumbent(image, map, incumbent);
  return image;
}

void render_heatmap(const PowerGrid& grid, const Deployment& deployment,
                    const IncumbentDrop& incumbent, const std::filesystem::path& image_path,
                    const ColorScale& scale, const Provenance& provenance) {
  const Image image = heatmap_image(grid, deployment, incumbent, scale);
  write_png(image_path, image,
            {{"provenance_hash", provenance.hash}, {"propagation_model", provenance.model_id}});
  std::filesystem::path legend = image_path;
  legend.replace_extension(".legend.json");
  write_json(legend, {{"color_min_dbm_per_mhz", scale.min_dbm_per_mhz},
                      {"color_max_dbm_per_mhz", scale.max_dbm_per_mhz},
                      {"colormap", "viridis"},
                      {"units", "dBm/MHz"},
                      {"resolution", grid.resolution},
                      {"propagation_model", provenance.model_id},
                      {"provenance_hash", provenance.hash}});
}

std::vector<std::uint8_t> site_indicators(const Deployment& deployment, const Emitter& emitter,
                                          const SensorAntenna& antenna,
                                          const LinkBudgetParams& link,
                                          const PropagationModel& model,
                                          const DropStreams& streams) {
  const Eigen::ArrayXXd table = sector_psd_table(deployment, emitter, antenna, link, model, streams);
  std::vector<std::uint8_t> out(deployment.size());
  for (std::size_t i = 0; i < deployment.size(); ++i) {
    const auto n_sectors =
        static_cast<Eigen::Index>(deployment.sites[i].sector_azimuths_deg.size());
    std::vector<double> sectors(static_cast<std::size_t>(n_sectors));
    for (Eigen::Index s = 0; s < n_sectors; ++s) {
      sectors[static_cast<std::size_t>(s)] = table(s, static_cast<Eigen::Index>(i));
    }
    out[i] = per_site_indicator(sectors, link.threshold_dbm_per_mhz) ? 1 : 0;
  }
  return out;
}

Image threshold_map_image(const Area& area, const Deployment& deployment,
                          std::span<const std::uint8_t> indicators, const IncumbentDrop& incumbent,
                          std::size_t size_px) {
  if (indicators.size() != deployment.size()) {
    throw std::invalid_argument("threshold map: one indicator per site required");
  }
  Image image(size_px, size_px, {255, 255, 255});
  const PixelMap map{area.side_length_m / 2.0, static_cast<double>(size_px)};
  image.draw_rect(0, 0, static_cast<long>(size_px) - 1, static_cast<long>(size_px) - 1,
                  {128, 128, 128});
  const double radius = std::clamp(
      0.25 * deployment.isd_m / area.side_length_m * static_cast<double>(size_px), 2.0, 8.0);
  for (std::size_t i = 0; i < deployment.size(); ++i) {
    const auto& site = deployment.sites[i];
    const Rgb color = indicators[i] ? Rgb{0, 170, 0} : Rgb{0, 0, 0};
    image.fill_disk(map.px(site.x_m), map.py(site.y_m), radius, color);
  }
  draw_incumbent(image, map, incumbent);
  return image;
}

void render_threshold_map(const Area& area, const Deployment& deployment,
                          std::span<const std::uint8_t> indicators, const IncumbentDrop& incumbent,
                          const std::filesystem::path& image_path, const Provenance& provenance) {
  const Image image = threshold_map_image(area, deployment, indicators, incumbent);
  const auto count = std::count(indicators.begin(), indicators.end(), std::uint8_t{1});
  write_png(image_path, image,
            {{"indicator_count", std::to_string(count)},
             {"site_count", std::to_string(deployment.size())},
             {"provenance_hash", provenance.hash},
             {"propagation_model", provenance.model_id}});
}

}  // namespace larsnet
