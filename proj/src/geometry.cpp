#include "larsnet/geometry.hpp"

#include <stdexcept>
#include <string>

namespace larsnet {

DropRegion DropRegion::square(double side_length_m) {
  if (!(side_length_m > 0.0) || !std::isfinite(side_length_m)) {
    throw std::invalid_argument("drop region: side length must be positive, got " +
                                std::to_string(side_length_m));
  }
  return {Shape::square, side_length_m / 2.0};
}

DropRegion DropRegion::disk_with_area(double area_m2) {
  if (!(area_m2 > 0.0) || !std::isfinite(area_m2)) {
    throw std::invalid_argument("drop region: disk area must be positive, got " +
                                std::to_string(area_m2));
  }
  return {Shape::disk, std::sqrt(area_m2 / std::numbers::pi)};
}

double DropRegion::area_m2() const {
  return shape_ == Shape::square ? 4.0 * extent_m_ * extent_m_
                                 : std::numbers::pi * extent_m_ * extent_m_;
}

bool DropRegion::contains(double x_m, double y_m, double tolerance_m) const {
  if (shape_ == Shape::square) {
    return std::abs(x_m) <= extent_m_ + tolerance_m && std::abs(y_m) <= extent_m_ + tolerance_m;
  }
  const double r = extent_m_ + tolerance_m;
  return x_m * x_m + y_m * y_m <= r * r;
}

Eigen::Matrix2Xd Deployment::xy() const {
  Eigen::Matrix2Xd out(2, static_cast<Eigen::Index>(sites.size()));
  for (std::size_t i = 0; i < sites.size(); ++i) {
    out(0, static_cast<Eigen::Index>(i)) = sites[i].x_m;
    out(1, static_cast<Eigen::Index>(i)) = sites[i].y_m;
  }
  return out;
}

Deployment generate_hex_deployment(const Area& area, double isd_m, double bs_height_m,
                                   AntennaMode mode) {
  if (isd_m > area.side_length_m) {
    throw std::invalid_argument("hex deployment: ISD " + std::to_string(isd_m) +
                                " m exceeds area side " + std::to_string(area.side_length_m) +
                                " m");
  }
  return generate_hex_deployment(DropRegion::square(area.side_length_m), isd_m, bs_height_m,
                                 mode);
}

Deployment generate_hex_deployment(const DropRegion& region, double isd_m, double bs_height_m,
                                   AntennaMode mode) {
  if (!(isd_m > 0.0) || !std::isfinite(isd_m)) {
    throw std::invalid_argument("hex deployment: ISD must be positive, got " +
                                std::to_string(isd_m));
  }
  const double row_spacing = std::sqrt(3.0) / 2.0 * isd_m;
  const double extent = region.extent_m();
  const double tol = 1e-9 * isd_m;
  const long max_row = static_cast<long>(std::ceil(extent / row_spacing)) + 1;
  const long max_col = static_cast<long>(std::ceil(extent / isd_m)) + 1;

  Deployment dep;
  dep.isd_m = isd_m;
  dep.antenna_mode = mode;
  const std::vector<double> azimuths =
      mode == AntennaMode::tri_sector
          ? std::vector<double>(kTriSectorAzimuthsDeg.begin(), kTriSectorAzimuthsDeg.end())
          : std::vector<double>{0.0};

  bool have_center = false;
  for (long row = -max_row; row <= max_row; ++row) {
    const double y = static_cast<double>(row) * row_spacing;
    const double shift = (row & 1) ? 0.5 : 0.0;
    for (long col = -max_col; col <= max_col; ++col) {
      const double x = (static_cast<double>(col) + shift) * isd_m;
      if (!region.contains(x, y, tol)) continue;
      if (row == 0 && col == 0) {
        dep.center_index = dep.sites.size();
        have_center = true;
      }
      dep.sites.push_back(BsSite{static_cast<int>(dep.sites.size()), x, y, bs_height_m, azimuths});
    }
  }
  if (dep.sites.empty() || !have_center) {
    throw std::invalid_argument("hex deployment: region too small for any site at ISD " +
                                std::to_string(isd_m) + " m");
  }
  return dep;
}

IncumbentDrop drop_incumbent(const DropRegion& region, double height_m, Engine& stream) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  IncumbentDrop drop;
  drop.height_m = height_m;
  const double extent = region.extent_m();
  if (region.shape() == DropRegion::Shape::square) {
    drop.x_m = (2.0 * unit(stream) - 1.0) * extent;
    drop.y_m = (2.0 * unit(stream) - 1.0) * extent;
  } else {
    const double r = extent * std::sqrt(unit(stream));
    const double theta = 2.0 * std::numbers::pi * unit(stream);
    drop.x_m = r * std::cos(theta);
    drop.y_m = r * std::sin(theta);
  }
  drop.boresight_azimuth_deg = wrap_azimuth_deg(360.0 * unit(stream));
  return drop;
}

PairGeometry pair_geometry(const Eigen::Vector3d& emitter, const Eigen::Vector3d& sensor) {
  const Eigen::Vector3d delta = sensor - emitter;
  PairGeometry g;
  g.horizontal_distance_m = std::hypot(delta.x(), delta.y());
  g.slant_distance_m = delta.norm();
  if (!(g.slant_distance_m > 0.0)) {
    throw std::invalid_argument("pair geometry: emitter and sensor are co-located");
  }
  g.azimuth_at_incumbent_deg = wrap_azimuth_deg(rad_to_deg(std::atan2(delta.y(), delta.x())));
  g.azimuth_at_sensor_deg = wrap_azimuth_deg(rad_to_deg(std::atan2(-delta.y(), -delta.x())));
  g.elevation_deg = rad_to_deg(std::atan2(delta.z(), g.horizontal_distance_m));
  return g;
}

PairGeometry pair_geometry(const IncumbentDrop& incumbent, const BsSite& site) {
  return pair_geometry(incumbent.position(), site.position());
}

GeodeticPoint local_to_geodetic(double east_m, double north_m, double anchor_lat_deg,
                                double anchor_lon_deg) {
  const double cos_lat = std::cos(deg_to_rad(anchor_lat_deg));
  if (std::abs(anchor_lat_deg) >= 90.0 || cos_lat <= 0.0) {
    throw std::invalid_argument("geodetic conversion: anchor latitude must be inside (-90, 90)");
  }
  return {anchor_lat_deg + rad_to_deg(north_m / kEarthRadiusM),
          anchor_lon_deg + rad_to_deg(east_m / (kEarthRadiusM * cos_lat))};
}

Eigen::Vector2d geodetic_to_local(const GeodeticPoint& point, double anchor_lat_deg,
                                  double anchor_lon_deg) {
  const double cos_lat = std::cos(deg_to_rad(anchor_lat_deg));
  if (std::abs(anchor_lat_deg) >= 90.0 || cos_lat <= 0.0) {
    throw std::invalid_argument("geodetic conversion: anchor latitude must be inside (-90, 90)");
  }
  return {deg_to_rad(point.lon_deg - anchor_lon_deg) * kEarthRadiusM * cos_lat,
          deg_to_rad(point.lat_deg - anchor_lat_deg) * kEarthRadiusM};
}

}  // namespace larsnet
