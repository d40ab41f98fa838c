#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "larsnet/random.hpp"

namespace larsnet {

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

// Wraps to [0, 360).
template <typename Scalar>
Scalar wrap_azimuth_deg(Scalar deg) {
  Scalar w = std::fmod(deg, Scalar(360));
  if (w < Scalar(0)) w += Scalar(360);
  if (w >= Scalar(360)) w -= Scalar(360);
  return w;
}

// Wraps an angular offset to (-180, 180].
template <typename Scalar>
Scalar wrap_offset_deg(Scalar deg) {
  Scalar w = wrap_azimuth_deg(deg);
  return w > Scalar(180) ? w - Scalar(360) : w;
}

struct Area {
  double side_length_m = 10'000.0;
};

// Region over which sites are deployed and incumbents are dropped: either the
// origin-centred square simulation area or an origin-centred disk footprint.
class DropRegion {
 public:
  enum class Shape { square, disk };

  static DropRegion square(double side_length_m);
  static DropRegion disk_with_area(double area_m2);

  [[nodiscard]] Shape shape() const { return shape_; }
  [[nodiscard]] double area_m2() const;
  // Half side length for squares, radius for disks.
  [[nodiscard]] double extent_m() const { return extent_m_; }
  [[nodiscard]] bool contains(double x_m, double y_m, double tolerance_m = 0.0) const;

 private:
  DropRegion(Shape shape, double extent_m) : shape_(shape), extent_m_(extent_m) {}
  Shape shape_;
  double extent_m_;
};

enum class AntennaMode { tri_sector, omni };

struct BsSite {
  int site_id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  double height_m = 0.0;
  std::vector<double> sector_azimuths_deg;

  [[nodiscard]] Eigen::Vector3d position() const { return {x_m, y_m, height_m}; }
};

struct Deployment {
  std::vector<BsSite> sites;
  std::size_t center_index = 0;
  double isd_m = 0.0;
  AntennaMode antenna_mode = AntennaMode::tri_sector;

  [[nodiscard]] const BsSite& center() const { return sites.at(center_index); }
  [[nodiscard]] std::size_t size() const { return sites.size(); }
  // 2 x N matrix of site coordinates.
  [[nodiscard]] Eigen::Matrix2Xd xy() const;
};

struct IncumbentDrop {
  double x_m = 0.0;
  double y_m = 0.0;
  double height_m = 0.0;
  double boresight_azimuth_deg = 0.0;

  [[nodiscard]] Eigen::Vector3d position() const { return {x_m, y_m, height_m}; }
};

struct PairGeometry {
  double horizontal_distance_m = 0.0;
  double slant_distance_m = 0.0;
  // Counter-clockwise from +x, degrees in [0, 360).
  double azimuth_at_incumbent_deg = 0.0;
  double azimuth_at_sensor_deg = 0.0;
  // Elevation of the sensor as seen from the incumbent, positive upward.
  double elevation_deg = 0.0;

  // Elevation of the incumbent as seen from the sensor.
  [[nodiscard]] double elevation_at_sensor_deg() const { return -elevation_deg; }
};

inline constexpr std::array<double, 3> kTriSectorAzimuthsDeg{60.0, 180.0, 300.0};

// Hex lattice with rows parallel to the x-axis, one site at the origin.
Deployment generate_hex_deployment(const Area& area, double isd_m, double bs_height_m,
                                   AntennaMode mode);
Deployment generate_hex_deployment(const DropRegion& region, double isd_m, double bs_height_m,
                                   AntennaMode mode);

IncumbentDrop drop_incumbent(const DropRegion& region, double height_m, Engine& stream);

PairGeometry pair_geometry(const Eigen::Vector3d& emitter, const Eigen::Vector3d& sensor);
PairGeometry pair_geometry(const IncumbentDrop& incumbent, const BsSite& site);

struct GeodeticPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

inline constexpr double kEarthRadiusM = 6'371'000.0;

// Spherical small-offset ENU conversion about an anchor (east/north offsets
// are measured from the anchor, i.e. the south-west corner of the area).
GeodeticPoint local_to_geodetic(double east_m, double north_m, double anchor_lat_deg,
                                double anchor_lon_deg);
Eigen::Vector2d geodetic_to_local(const GeodeticPoint& point, double anchor_lat_deg,
                                  double anchor_lon_deg);

}  // namespace larsnet
