#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "larsnet/sensing.hpp"

namespace larsnet {

enum class CiMethod { normal, clopper_pearson };
enum class DropWeighting { equal, by_n_on };

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Conditional metrics (edp, tdp, tmp_on) are NaN when n_on == 0.
struct MetricsReport {
  std::string scenario_id;
  double edp = kNaN;
  double tdp = kNaN;
  double tmp_on = kNaN;
  double tmp_abs = kNaN;
  double edp_ci = kNaN;
  double tdp_ci = kNaN;
  double tmp_on_ci = kNaN;
  double tmp_abs_ci = kNaN;

  std::size_t n_on = 0;
  std::size_t total_slots = 0;
  std::size_t n_ideal_detected = 0;  // ON slots with D^I = 1
  std::size_t n_detected = 0;        // ON slots with D = 1
  std::size_t n_missed = 0;          // slots with a = 1 and D = 0

  std::size_t drops = 1;
  std::size_t drops_without_on = 0;
  bool aggregate = false;

  [[nodiscard]] bool conditional_defined() const { return n_on > 0 && edp == edp; }
};

std::optional<double> estimate_edp(const SlotTrace& trace);
std::optional<double> estimate_tdp(const SlotTrace& trace);

struct TmpEstimate {
  std::optional<double> tmp_on;
  double tmp_abs = kNaN;
};
TmpEstimate estimate_tmp(const SlotTrace& trace);

// 95% half-width for `successes` out of `trials`.
double binomial_halfwidth(std::size_t successes, std::size_t trials, CiMethod method);

MetricsReport summarize_trace(const SlotTrace& trace, CiMethod method = CiMethod::normal,
                              std::string scenario_id = {});

// equal: drop-averaged means, CI from the spread across drops.
// by_n_on: pooled over all (drop, slot) pairs with binomial CIs.
MetricsReport aggregate_over_drops(std::span<const MetricsReport> reports,
                                   DropWeighting weighting = DropWeighting::equal,
                                   CiMethod method = CiMethod::normal);

}  // namespace larsnet
