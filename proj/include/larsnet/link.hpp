#pragma once

#include <cmath>

#include <Eigen/Core>

#include "larsnet/antennas.hpp"
#include "larsnet/geometry.hpp"
#include "larsnet/propagation.hpp"
#include "larsnet/random.hpp"

namespace larsnet {

struct LinkBudgetParams {
  double eirp_max_dbm = 63.0;
  double incumbent_max_gain_dbi = 33.1;
  double bandwidth_hz = 30e6;
  double frequency_hz = 7.25e9;
  double noise_sigma_db = 3.0;
  double threshold_dbm_per_mhz = -89.0;
  // Reproduces the printed "+10 log10(B / 1 MHz)" density conversion.
  bool psd_sign_paper_literal = false;

  void validate() const;
  bool operator==(const LinkBudgetParams&) const = default;
};

struct LinkResult {
  double rx_power_dbm = 0.0;
  double psd_dbm_per_mhz = 0.0;
  bool above_threshold = false;
};

template <typename Scalar>
Scalar received_power(const LinkBudgetParams& params, Scalar incumbent_gain_dbi,
                      Scalar path_loss_db, Scalar sensor_gain_dbi) {
  return Scalar(params.eirp_max_dbm) - Scalar(params.incumbent_max_gain_dbi) +
         incumbent_gain_dbi - path_loss_db + sensor_gain_dbi;
}

// Per-MHz density of a signal spread over `bandwidth_hz`.
double to_psd(double rx_power_dbm, double bandwidth_hz, bool paper_literal_sign = false);

double apply_noise(double psd_dbm_per_mhz, double sigma_db, Engine& stream);

inline bool threshold_test(double psd_dbm_per_mhz, double gamma_dbm_per_mhz) {
  return psd_dbm_per_mhz >= gamma_dbm_per_mhz;
}

LinkResult evaluate_link(const LinkBudgetParams& params, double incumbent_gain_dbi,
                         double path_loss_db, double sensor_gain_dbi);

// Sensor antenna as mounted on a site: a sector pattern per boresight or a
// single omni.
struct SensorAntenna {
  AntennaMode mode = AntennaMode::tri_sector;
  SectorPatternd sector;
  OmniPatternd omni;

  // Gain toward the incumbent for the sector pointing at `sector_azimuth_deg`.
  [[nodiscard]] double gain_dbi(const PairGeometry& pair, double sector_azimuth_deg) const;
  bool operator==(const SensorAntenna&) const = default;
};

struct Emitter {
  DishPatternd dish;
  IncumbentDrop drop;
};

// Noise-free PSD (dBm/MHz) for every (sector, site) pair of a deployment:
// rows are sectors, columns are sites. Path loss is evaluated once per site;
// stochastic models draw from a per-site shadowing stream.
Eigen::ArrayXXd sector_psd_table(const Deployment& deployment, const Emitter& emitter,
                                 const SensorAntenna& antenna, const LinkBudgetParams& params,
                                 const PropagationModel& model, const DropStreams& streams);

}  // namespace larsnet
