#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "larsnet/geometry.hpp"
#include "larsnet/link.hpp"
#include "larsnet/propagation.hpp"
#include "larsnet/random.hpp"

namespace larsnet {

struct SlotModel {
  std::size_t num_slots = 10'000;
  double p_on = 0.3;
  double duty_cycle = 0.2;
  std::size_t fusion_k = 1;

  void validate() const;
  void validate_for(std::size_t num_sensors) const;
  bool operator==(const SlotModel&) const = default;
};

enum class FusionUnit { per_site, per_sector };

using IndicatorMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Slot-level record of one drop. Per-sensor indicator matrices (sensors x
// slots) are kept only when requested; the per-slot columns always are.
struct SlotTrace {
  std::size_t num_sensors = 0;
  std::size_t fusion_k = 1;
  std::vector<std::uint8_t> activity;
  std::vector<std::uint32_t> ideal_count;
  std::vector<std::uint32_t> effective_count;
  std::vector<std::uint8_t> ideal_decision;
  std::vector<std::uint8_t> decision;
  IndicatorMatrix ideal;
  IndicatorMatrix sensing;

  [[nodiscard]] std::size_t num_slots() const { return activity.size(); }
  [[nodiscard]] std::size_t n_on() const;
  [[nodiscard]] bool has_sensor_detail() const { return ideal.size() > 0; }
};

// Builds a trace from explicit indicators. `ideal(i, t)` is d^I and
// `sensing(i, t)` is b; effective indicators are their product.
SlotTrace build_trace(std::span<const std::uint8_t> activity, const IndicatorMatrix& ideal,
                      const IndicatorMatrix& sensing, std::size_t fusion_k,
                      bool keep_sensor_detail = true);

// Re-evaluates both network decisions for another fusion threshold.
SlotTrace refuse_trace(const SlotTrace& trace, std::size_t fusion_k);

// Best-sector rule.
bool per_site_indicator(std::span<const double> sector_psds, double gamma_dbm_per_mhz);

// Noise-free detection inputs for the sensors that take part in fusion.
// Sensors of one site share a duty stream id, so they sense together.
struct SensorSet {
  std::vector<double> psd_dbm_per_mhz;
  std::vector<std::uint64_t> noise_stream_id;
  std::vector<std::uint64_t> duty_stream_id;

  [[nodiscard]] std::size_t size() const { return psd_dbm_per_mhz.size(); }
};

// `site_indices` empty means every site.
SensorSet make_sensor_set(const Deployment& deployment, const Eigen::ArrayXXd& sector_psds,
                          FusionUnit unit, std::span<const std::size_t> site_indices = {});

struct SlotSimulationOptions {
  bool record_sensor_detail = false;
  // Off: every sensor listens in every slot, so only the ideal decisions carry
  // information and no duty draws are made.
  bool simulate_duty = true;
};

// Per slot, a noisy sensor detects with the Gaussian tail probability of its
// margin over the threshold. The indicator is drawn directly as a Bernoulli
// from one 64-bit engine output, which has the same law as adding the noise and
// testing. Probabilities below 2^-64 are treated as zero and need no draws.
SlotTrace simulate_slots(const SensorSet& sensors, double gamma_dbm_per_mhz, double noise_sigma_db,
                         const SlotModel& slots, const DropStreams& streams,
                         const SlotSimulationOptions& options = {});

SlotTrace simulate_slots(const Deployment& deployment, const Emitter& emitter,
                         const SensorAntenna& antenna, const LinkBudgetParams& link,
                         const PropagationModel& model, const SlotModel& slots,
                         const DropStreams& streams, FusionUnit unit = FusionUnit::per_site,
                         const SlotSimulationOptions& options = {});

// Columnar export: slot,a,sum_ideal,sum_effective,D_ideal,D
void write_trace_csv(std::ostream& out, const SlotTrace& trace);

}  // namespace larsnet
