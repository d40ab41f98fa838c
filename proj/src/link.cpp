#include "larsnet/link.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace larsnet {

void LinkBudgetParams::validate() const {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("link: bandwidth must be positive");
  if (!(frequency_hz > 0.0)) throw std::invalid_argument("link: frequency must be positive");
  if (!(noise_sigma_db >= 0.0)) throw std::invalid_argument("link: noise sigma must be >= 0");
  if (!std::isfinite(eirp_max_dbm) || !std::isfinite(incumbent_max_gain_dbi) ||
      !std::isfinite(threshold_dbm_per_mhz)) {
    throw std::invalid_argument("link: non-finite budget term");
  }
}

double to_psd(double rx_power_dbm, double bandwidth_hz, bool paper_literal_sign) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("to_psd: bandwidth must be positive");
  const double spread_db = 10.0 * std::log10(bandwidth_hz / 1e6);
  return paper_literal_sign ? rx_power_dbm + spread_db : rx_power_dbm - spread_db;
}

double apply_noise(double psd_dbm_per_mhz, double sigma_db, Engine& stream) {
  if (!(sigma_db >= 0.0)) throw std::invalid_argument("apply_noise: sigma must be >= 0");
  if (sigma_db == 0.0) return psd_dbm_per_mhz;
  std::normal_distribution<double> noise(0.0, sigma_db);
  return psd_dbm_per_mhz + noise(stream);
}

LinkResult evaluate_link(const LinkBudgetParams& params, double incumbent_gain_dbi,
                         double path_loss_db, double sensor_gain_dbi) {
  LinkResult r;
  r.rx_power_dbm = received_power(params, incumbent_gain_dbi, path_loss_db, sensor_gain_dbi);
  r.psd_dbm_per_mhz = to_psd(r.rx_power_dbm, params.bandwidth_hz, params.psd_sign_paper_literal);
  r.above_threshold = threshold_test(r.psd_dbm_per_mhz, params.threshold_dbm_per_mhz);
  return r;
}

double SensorAntenna::gain_dbi(const PairGeometry& pair, double sector_azimuth_deg) const {
  const double el = pair.elevation_at_sensor_deg();
  if (mode == AntennaMode::omni) return omni_gain(omni, el);
  return sector_gain(sector, pair.azimuth_at_sensor_deg - sector_azimuth_deg, el);
}

Eigen::ArrayXXd sector_psd_table(const Deployment& deployment, const Emitter& emitter,
                                 const SensorAntenna& antenna, const LinkBudgetParams& params,
                                 const PropagationModel& model, const DropStreams& streams) {
  Eigen::Index max_sectors = 0;
  for (const auto& site : deployment.sites) {
    max_sectors = std::max<Eigen::Index>(max_sectors,
                                         static_cast<Eigen::Index>(site.sector_azimuths_deg.size()));
  }
  Eigen::ArrayXXd table = Eigen::ArrayXXd::Constant(
      max_sectors, static_cast<Eigen::Index>(deployment.size()),
      -std::numeric_limits<double>::infinity());
  const bool stochastic = model.stochastic();
  Engine unused;
  for (std::size_t i = 0; i < deployment.size(); ++i) {
    const BsSite& site = deployment.sites[i];
    const PairGeometry pair = pair_geometry(emitter.drop, site);
    double loss = 0.0;
    if (stochastic) {
      Engine shadow = streams.stream(StreamKind::shadowing, static_cast<std::uint64_t>(site.site_id));
      loss = model.path_loss_db(pair, params.frequency_hz, shadow);
    } else {
      loss = model.path_loss_db(pair, params.frequency_hz, unused);
    }
    const double g_inc = dish_gain_toward(emitter.dish, emitter.drop.boresight_azimuth_deg,
                                          pair.azimuth_at_incumbent_deg, pair.elevation_deg);
    for (std::size_t s = 0; s < site.sector_azimuths_deg.size(); ++s) {
      const double g_bs = antenna.gain_dbi(pair, site.sector_azimuths_deg[s]);
      const double prx = received_power(params, g_inc, loss, g_bs);
      table(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) =
          to_psd(prx, params.bandwidth_hz, params.psd_sign_paper_literal);
    }
  }
  return table;
}

}  // namespace larsnet
