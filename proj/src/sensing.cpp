#include "larsnet/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace larsnet {

namespace {

// Bernoulli draw as a single integer compare. The rarer outcome is the one
// cut from the engine range so that tiny probabilities keep their precision.
struct Coin {
  std::uint64_t cut = 0;
  bool invert = false;

  [[nodiscard]] bool fixed() const { return cut == 0; }
  bool operator()(Engine& e) const { return (e() < cut) != invert; }
  [[nodiscard]] bool value() const { return invert; }
};

Coin make_coin(double p_true, double p_false) {
  const bool invert = p_false < p_true;
  const double rare = std::clamp(invert ? p_false : p_true, 0.0, 0.5);
  return {static_cast<std::uint64_t>(std::ldexp(rare, 64)), invert};
}

Coin detection_coin(double margin_db, double sigma_db) {
  if (sigma_db == 0.0) return {0, margin_db >= 0.0};
  const double z = margin_db / (sigma_db * std::sqrt(2.0));
  return make_coin(0.5 * std::erfc(-z), 0.5 * std::erfc(z));
}

}  // namespace

void SlotModel::validate() const {
  if (num_slots < 1) throw std::invalid_argument("slot model: num_slots must be >= 1");
  if (!(p_on >= 0.0 && p_on <= 1.0)) throw std::invalid_argument("slot model: p_on outside [0, 1]");
  if (!(duty_cycle >= 0.0 && duty_cycle <= 1.0)) {
    throw std::invalid_argument("slot model: duty_cycle outside [0, 1]");
  }
  if (fusion_k < 1) throw std::invalid_argument("slot model: fusion_k must be >= 1");
}

void SlotModel::validate_for(std::size_t num_sensors) const {
  validate();
  if (fusion_k > num_sensors) {
    throw std::invalid_argument("slot model: fusion_k " + std::to_string(fusion_k) +
                                " exceeds sensor count " + std::to_string(num_sensors));
  }
}

std::size_t SlotTrace::n_on() const {
  return static_cast<std::size_t>(std::count(activity.begin(), activity.end(), std::uint8_t{1}));
}

namespace {

void decide(SlotTrace& trace) {
  const std::size_t n = trace.num_slots();
  trace.ideal_decision.assign(n, 0);
  trace.decision.assign(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    trace.ideal_decision[t] = trace.ideal_count[t] >= trace.fusion_k ? 1 : 0;
    trace.decision[t] = trace.effective_count[t] >= trace.fusion_k ? 1 : 0;
  }
}

}  // namespace

SlotTrace build_trace(std::span<const std::uint8_t> activity, const IndicatorMatrix& ideal,
                      const IndicatorMatrix& sensing, std::size_t fusion_k,
                      bool keep_sensor_detail) {
  const auto slots = static_cast<Eigen::Index>(activity.size());
  if (ideal.cols() != slots || sensing.cols() != slots || ideal.rows() != sensing.rows()) {
    throw std::invalid_argument("build_trace: indicator shapes do not match the slot count");
  }
  if (fusion_k < 1) throw std::invalid_argument("build_trace: fusion_k must be >= 1");
  SlotTrace trace;
  trace.num_sensors = static_cast<std::size_t>(ideal.rows());
  trace.fusion_k = fusion_k;
  trace.activity.assign(activity.begin(), activity.end());
  trace.ideal_count.assign(activity.size(), 0);
  trace.effective_count.assign(activity.size(), 0);
  for (Eigen::Index t = 0; t < slots; ++t) {
    for (Eigen::Index i = 0; i < ideal.rows(); ++i) {
      const bool d_ideal = ideal(i, t) != 0;
      trace.ideal_count[static_cast<std::size_t>(t)] += d_ideal ? 1 : 0;
      trace.effective_count[static_cast<std::size_t>(t)] += (d_ideal && sensing(i, t) != 0) ? 1 : 0;
    }
  }
  decide(trace);
  if (keep_sensor_detail) {
    trace.ideal = ideal;
    trace.sensing = sensing;
  }
  return trace;
}

SlotTrace refuse_trace(const SlotTrace& trace, std::size_t fusion_k) {
  if (fusion_k < 1) throw std::invalid_argument("refuse_trace: fusion_k must be >= 1");
  SlotTrace out = trace;
  out.fusion_k = fusion_k;
  decide(out);
  return out;
}

bool per_site_indicator(std::span<const double> sector_psds, double gamma_dbm_per_mhz) {
  if (sector_psds.empty()) throw std::invalid_argument("per_site_indicator: no sector values");
  return threshold_test(*std::max_element(sector_psds.begin(), sector_psds.end()),
                        gamma_dbm_per_mhz);
}

SensorSet make_sensor_set(const Deployment& deployment, const Eigen::ArrayXXd& sector_psds,
                          FusionUnit unit, std::span<const std::size_t> site_indices) {
  std::vector<std::size_t> all;
  if (site_indices.empty()) {
    all.resize(deployment.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    site_indices = all;
  }
  SensorSet set;
  for (std::size_t idx : site_indices) {
    const BsSite& site = deployment.sites.at(idx);
    const auto col = static_cast<Eigen::Index>(idx);
    const auto n_sectors = static_cast<Eigen::Index>(site.sector_azimuths_deg.size());
    const auto id = static_cast<std::uint64_t>(site.site_id);
    if (unit == FusionUnit::per_site) {
      set.psd_dbm_per_mhz.push_back(sector_psds.col(col).head(n_sectors).maxCoeff());
      set.noise_stream_id.push_back(id);
      set.duty_stream_id.push_back(id);
    } else {
      for (Eigen::Index s = 0; s < n_sectors; ++s) {
        set.psd_dbm_per_mhz.push_back(sector_psds(s, col));
        set.noise_stream_id.push_back((id << 8) | static_cast<std::uint64_t>(s) | (1ull << 63));
        set.duty_stream_id.push_back(id);
      }
    }
  }
  return set;
}

SlotTrace simulate_slots(const SensorSet& sensors, double gamma_dbm_per_mhz, double noise_sigma_db,
                         const SlotModel& slots, const DropStreams& streams,
                         const SlotSimulationOptions& options) {
  slots.validate_for(sensors.size());
  if (!(noise_sigma_db >= 0.0)) throw std::invalid_argument("simulate_slots: noise sigma < 0");
  const std::size_t n_slots = slots.num_slots;
  const std::size_t n_sensors = sensors.size();

  SlotTrace trace;
  trace.num_sensors = n_sensors;
  trace.fusion_k = slots.fusion_k;
  trace.activity.resize(n_slots);
  {
    Engine activity_stream = streams.stream(StreamKind::activity);
    std::bernoulli_distribution on(slots.p_on);
    for (auto& a : trace.activity) a = on(activity_stream) ? 1 : 0;
  }
  trace.ideal_count.assign(n_slots, 0);
  trace.effective_count.assign(n_slots, 0);
  if (options.record_sensor_detail) {
    trace.ideal = IndicatorMatrix::Zero(static_cast<Eigen::Index>(n_sensors),
                                        static_cast<Eigen::Index>(n_slots));
    trace.sensing = IndicatorMatrix::Zero(static_cast<Eigen::Index>(n_sensors),
                                          static_cast<Eigen::Index>(n_slots));
  }

  const Coin duty = options.simulate_duty ? make_coin(slots.duty_cycle, 1.0 - slots.duty_cycle)
                                          : Coin{0, true};
  const bool detail = options.record_sensor_detail;
  std::vector<std::uint32_t> on_slots;
  for (std::size_t t = 0; t < n_slots; ++t) {
    if (trace.activity[t]) on_slots.push_back(static_cast<std::uint32_t>(t));
  }
  // Sensors that detect in every ON slot and always listen are only counted.
  std::uint32_t static_detectors = 0;

  for (std::size_t i = 0; i < n_sensors; ++i) {
    const double margin = sensors.psd_dbm_per_mhz[i] - gamma_dbm_per_mhz;
    const Coin detect = detection_coin(margin, noise_sigma_db);
    if (!detail && detect.fixed() && !detect.value()) continue;
    if (!detail && detect.fixed() && duty.fixed()) {
      static_detectors += 1;
      continue;
    }

    Engine duty_stream =
        duty.fixed() ? Engine{0} : streams.stream(StreamKind::duty, sensors.duty_stream_id[i]);
    Engine noise_stream = detect.fixed()
                              ? Engine{0}
                              : streams.stream(StreamKind::noise, sensors.noise_stream_id[i]);
    auto draw_detect = [&] { return detect.fixed() ? detect.value() : detect(noise_stream); };

    if (!detail && duty.fixed()) {
      // b is constant, so only ON slots need visiting.
      const std::uint32_t b = duty.value() ? 1 : 0;
      for (std::uint32_t t : on_slots) {
        const std::uint32_t d = draw_detect() ? 1 : 0;
        trace.ideal_count[t] += d;
        trace.effective_count[t] += d & b;
      }
      continue;
    }

    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t t = 0; t < n_slots; ++t) {
      const bool b = duty.fixed() ? duty.value() : duty(duty_stream);
      const bool d_ideal = trace.activity[t] && draw_detect();
      trace.ideal_count[t] += d_ideal ? 1 : 0;
      trace.effective_count[t] += (d_ideal && b) ? 1 : 0;
      if (detail) {
        const auto col = static_cast<Eigen::Index>(t);
        trace.ideal(row, col) = d_ideal ? 1 : 0;
        trace.sensing(row, col) = b ? 1 : 0;
      }
    }
  }
  if (static_detectors > 0) {
    const std::uint32_t listening = duty.value() ? static_detectors : 0;
    for (std::uint32_t t : on_slots) {
      trace.ideal_count[t] += static_detectors;
      trace.effective_count[t] += listening;
    }
  }
  decide(trace);
  return trace;
}

SlotTrace simulate_slots(const Deployment& deployment, const Emitter& emitter,
                         const SensorAntenna& antenna, const LinkBudgetParams& link,
                         const PropagationModel& model, const SlotModel& slots,
                         const DropStreams& streams, FusionUnit unit,
                         const SlotSimulationOptions& options) {
  if (deployment.sites.empty()) throw std::invalid_argument("simulate_slots: empty deployment");
  const Eigen::ArrayXXd table = sector_psd_table(deployment, emitter, antenna, link, model, streams);
  const SensorSet sensors = make_sensor_set(deployment, table, unit);
  return simulate_slots(sensors, link.threshold_dbm_per_mhz, link.noise_sigma_db, slots, streams,
                        options);
}

void write_trace_csv(std::ostream& out, const SlotTrace& trace) {
  out << "slot,a,sum_ideal,sum_effective,D_ideal,D\n";
  for (std::size_t t = 0; t < trace.num_slots(); ++t) {
    out << t << ',' << int(trace.activity[t]) << ',' << trace.ideal_count[t] << ','
        << trace.effective_count[t] << ',' << int(trace.ideal_decision[t]) << ','
        << int(trace.decision[t]) << '\n';
  }
}

}  // namespace larsnet
