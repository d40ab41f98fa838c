#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "larsnet/config.hpp"
#include "larsnet/geometry.hpp"
#include "larsnet/image.hpp"
#include "larsnet/link.hpp"
#include "larsnet/propagation.hpp"

namespace larsnet {

// Noise-free PSD sampled on a regular lattice of `resolution` points per axis
// spanning the simulation area edge to edge. psd(row, col) sits at
// (x_at(col), y_at(row)).
struct PowerGrid {
  std::size_t resolution = 0;
  double half_extent_m = 0.0;
  Eigen::ArrayXXd psd;

  [[nodiscard]] double coordinate(std::size_t k) const {
    return -half_extent_m + (2.0 * half_extent_m * static_cast<double>(k)) /
                                static_cast<double>(resolution - 1);
  }
  [[nodiscard]] double x_at(std::size_t col) const { return coordinate(col); }
  [[nodiscard]] double y_at(std::size_t row) const { return coordinate(row); }
};

struct GridOptions {
  GridMode mode = GridMode::dense_field;
  ProbeAntenna probe = ProbeAntenna::isotropic;
  double idw_power = 2.0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// `warnings` receives a note when the incumbent lies outside the area.
PowerGrid compute_power_grid(const Area& area, const Deployment& deployment,
                             const Emitter& emitter, const SensorAntenna& antenna,
                             const LinkBudgetParams& link, const PropagationModel& model,
                             std::size_t resolution, const GridOptions& options = {},
                             std::ostream* warnings = nullptr);

// x_m,y_m,psd_dbm_per_mhz with full double precision.
void write_grid_csv(std::ostream& out, const PowerGrid& grid);
PowerGrid read_grid_csv(std::istream& in);

struct ColorScale {
  double min_dbm_per_mhz = -140.0;
  double max_dbm_per_mhz = -40.0;
};

// Field colouring with site and incumbent markers; one pixel per grid point.
Image heatmap_image(const PowerGrid& grid, const Deployment& deployment,
                    const IncumbentDrop& incumbent, const ColorScale& scale);

struct Provenance {
  std::string hash;
  std::string model_id;
};

// Writes the PNG plus `<stem>.legend.json` describing the colour scale.
void render_heatmap(const PowerGrid& grid, const Deployment& deployment,
                    const IncumbentDrop& incumbent, const std::filesystem::path& image_path,
                    const ColorScale& scale, const Provenance& provenance);

// Noise-free best-sector indicator per site.
std::vector<std::uint8_t> site_indicators(const Deployment& deployment, const Emitter& emitter,
                                          const SensorAntenna& antenna,
                                          const LinkBudgetParams& link,
                                          const PropagationModel& model,
                                          const DropStreams& streams);

Image threshold_map_image(const Area& area, const Deployment& deployment,
                          std::span<const std::uint8_t> indicators, const IncumbentDrop& incumbent,
                          std::size_t size_px = 800);

// PNG text chunk "indicator_count" carries the number of flagged sites.
void render_threshold_map(const Area& area, const Deployment& deployment,
                          std::span<const std::uint8_t> indicators, const IncumbentDrop& incumbent,
                          const std::filesystem::path& image_path, const Provenance& provenance);

}  // namespace larsnet
