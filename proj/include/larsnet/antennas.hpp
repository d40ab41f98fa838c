#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "larsnet/geometry.hpp"

namespace larsnet {

// Composite single-beam sector pattern, parabolic in dB in each principal
// plane. Offsets are relative to the sector boresight.
template <typename Scalar>
struct SectorPattern {
  Scalar max_gain_dbi = Scalar(15.4);
  Scalar h_hpbw_deg = Scalar(90);
  Scalar v_hpbw_deg = Scalar(9);
  Scalar front_to_back_db = Scalar(30);
  Scalar sidelobe_floor_db = Scalar(30);
  Scalar electrical_downtilt_deg = Scalar(0);

  void validate() const {
    if (!(h_hpbw_deg > 0 && h_hpbw_deg <= 180) || !(v_hpbw_deg > 0 && v_hpbw_deg <= 180)) {
      throw std::invalid_argument("sector pattern: HPBW must be in (0, 180] degrees");
    }
    if (!std::isfinite(max_gain_dbi)) throw std::invalid_argument("sector pattern: gain not finite");
    if (!(front_to_back_db > 0)) {
      throw std::invalid_argument("sector pattern: front-to-back ratio must be positive");
    }
    if (!(sidelobe_floor_db > 0)) {
      throw std::invalid_argument("sector pattern: sidelobe floor must be positive");
    }
  }
  bool operator==(const SectorPattern&) const = default;
};

// Elevation-only omnidirectional pattern; azimuth never enters.
template <typename Scalar>
struct OmniPattern {
  Scalar max_gain_dbi = Scalar(7);
  Scalar v_hpbw_deg = Scalar(18);
  Scalar sidelobe_floor_db = Scalar(15);

  void validate() const {
    if (!(v_hpbw_deg > 0 && v_hpbw_deg <= 180)) {
      throw std::invalid_argument("omni pattern: HPBW must be in (0, 180] degrees");
    }
    if (!std::isfinite(max_gain_dbi)) throw std::invalid_argument("omni pattern: gain not finite");
    if (!(sidelobe_floor_db > 0)) {
      throw std::invalid_argument("omni pattern: sidelobe floor must be positive");
    }
  }
  bool operator==(const OmniPattern&) const = default;
};

// Circularly symmetric mainlobe with a flat back-lobe floor.
template <typename Scalar>
struct DishPattern {
  Scalar max_gain_dbi = Scalar(33.1);
  Scalar hpbw_deg = Scalar(3.7);
  Scalar front_to_back_db = Scalar(40);
  Scalar boresight_elevation_deg = Scalar(0);

  void validate() const {
    if (!(hpbw_deg > 0 && hpbw_deg <= 180)) {
      throw std::invalid_argument("dish pattern: HPBW must be in (0, 180] degrees");
    }
    if (!std::isfinite(max_gain_dbi)) throw std::invalid_argument("dish pattern: gain not finite");
    if (!(front_to_back_db > 0)) {
      throw std::invalid_argument("dish pattern: front-to-back ratio must be positive");
    }
  }
  bool operator==(const DishPattern&) const = default;
};

using SectorPatternd = SectorPattern<double>;
using OmniPatternd = OmniPattern<double>;
using DishPatternd = DishPattern<double>;

// 12 (x / x3dB)^2 attenuation law shared by every pattern.
template <typename Scalar>
constexpr Scalar parabolic_attenuation_db(Scalar offset_deg, Scalar hpbw_deg) {
  const Scalar r = offset_deg / hpbw_deg;
  return Scalar(12) * r * r;
}

template <typename Scalar>
Scalar sector_gain(const SectorPattern<Scalar>& p, Scalar az_offset_deg, Scalar el_offset_deg) {
  const Scalar az = wrap_offset_deg(az_offset_deg);
  const Scalar horizontal =
      -std::min(parabolic_attenuation_db(az, p.h_hpbw_deg), p.front_to_back_db);
  const Scalar vertical = -std::min(
      parabolic_attenuation_db(el_offset_deg - p.electrical_downtilt_deg, p.v_hpbw_deg),
      p.sidelobe_floor_db);
  return p.max_gain_dbi - std::min(-(horizontal + vertical), p.front_to_back_db);
}

template <typename Scalar>
Scalar omni_gain(const OmniPattern<Scalar>& p, Scalar el_offset_deg) {
  return std::max(p.max_gain_dbi - parabolic_attenuation_db(el_offset_deg, p.v_hpbw_deg),
                  p.max_gain_dbi - p.sidelobe_floor_db);
}

// Total angle between the boresight and a direction, both given as
// (azimuth, elevation) on the unit sphere.
template <typename Scalar>
Scalar angular_separation_deg(Scalar az1_deg, Scalar el1_deg, Scalar az2_deg, Scalar el2_deg) {
  const Scalar e1 = deg_to_rad(el1_deg);
  const Scalar e2 = deg_to_rad(el2_deg);
  const Scalar da = deg_to_rad(az2_deg - az1_deg);
  const Scalar c = std::sin(e1) * std::sin(e2) + std::cos(e1) * std::cos(e2) * std::cos(da);
  return rad_to_deg(std::acos(std::clamp(c, Scalar(-1), Scalar(1))));
}

template <typename Scalar>
Scalar dish_gain_at_separation(const DishPattern<Scalar>& p, Scalar psi_deg) {
  return std::max(p.max_gain_dbi - parabolic_attenuation_db(psi_deg, p.hpbw_deg),
                  p.max_gain_dbi - p.front_to_back_db);
}

// Offsets relative to a horizontal boresight.
template <typename Scalar>
Scalar dish_gain(const DishPattern<Scalar>& p, Scalar az_offset_deg, Scalar el_offset_deg) {
  return dish_gain_at_separation(
      p, angular_separation_deg(Scalar(0), Scalar(0), az_offset_deg, el_offset_deg));
}

// Gain toward an absolute direction for a dish pointing at
// (boresight_az, p.boresight_elevation_deg).
template <typename Scalar>
Scalar dish_gain_toward(const DishPattern<Scalar>& p, Scalar boresight_az_deg, Scalar az_deg,
                        Scalar el_deg) {
  return dish_gain_at_separation(
      p, angular_separation_deg(boresight_az_deg, p.boresight_elevation_deg, az_deg, el_deg));
}

}  // namespace larsnet
