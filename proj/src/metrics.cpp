#include "larsnet/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/beta.hpp>

namespace larsnet {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct Counts {
  std::size_t n_on = 0;
  std::size_t ideal = 0;
  std::size_t detected = 0;
  std::size_t missed = 0;
};

Counts count(const SlotTrace& trace) {
  Counts c;
  for (std::size_t t = 0; t < trace.num_slots(); ++t) {
    if (!trace.activity[t]) continue;
    ++c.n_on;
    c.ideal += trace.ideal_decision[t];
    c.detected += trace.decision[t];
    c.missed += trace.decision[t] ? 0 : 1;
  }
  return c;
}

struct MeanSe {
  double mean = kNaN;
  double halfwidth = kNaN;
};

MeanSe mean_with_halfwidth(const std::vector<double>& values) {
  MeanSe out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  out.halfwidth = kZ95 * sd / std::sqrt(static_cast<double>(values.size()));
  return out;
}

}  // namespace

std::optional<double> estimate_edp(const SlotTrace& trace) {
  const Counts c = count(trace);
  if (c.n_on == 0) return std::nullopt;
  return static_cast<double>(c.ideal) / static_cast<double>(c.n_on);
}

std::optional<double> estimate_tdp(const SlotTrace& trace) {
  const Counts c = count(trace);
  if (c.n_on == 0) return std::nullopt;
  return static_cast<double>(c.detected) / static_cast<double>(c.n_on);
}

TmpEstimate estimate_tmp(const SlotTrace& trace) {
  if (trace.num_slots() == 0) throw std::invalid_argument("estimate_tmp: empty trace");
  const Counts c = count(trace);
  TmpEstimate out;
  if (c.n_on > 0) out.tmp_on = 1.0 - static_cast<double>(c.detected) / static_cast<double>(c.n_on);
  out.tmp_abs = static_cast<double>(c.missed) / static_cast<double>(trace.num_slots());
  return out;
}

double binomial_halfwidth(std::size_t successes, std::size_t trials, CiMethod method) {
  if (trials == 0) return kNaN;
  const double n = static_cast<double>(trials);
  const double k = static_cast<double>(successes);
  if (method == CiMethod::normal) {
    const double p = k / n;
    return kZ95 * std::sqrt(p * (1.0 - p) / n);
  }
  const double alpha = 0.05;
  const double lower =
      successes == 0 ? 0.0
                     : boost::math::quantile(boost::math::beta_distribution<double>(k, n - k + 1.0),
                                             alpha / 2.0);
  const double upper =
      successes == trials
          ? 1.0
          : boost::math::quantile(boost::math::beta_distribution<double>(k + 1.0, n - k),
                                  1.0 - alpha / 2.0);
  return (upper - lower) / 2.0;
}

MetricsReport summarize_trace(const SlotTrace& trace, CiMethod method, std::string scenario_id) {
  if (trace.num_slots() == 0) throw std::invalid_argument("summarize_trace: empty trace");
  const Counts c = count(trace);
  MetricsReport r;
  r.scenario_id = std::move(scenario_id);
  r.n_on = c.n_on;
  r.total_slots = trace.num_slots();
  r.n_ideal_detected = c.ideal;
  r.n_detected = c.detected;
  r.n_missed = c.missed;
  r.drops_without_on = c.n_on == 0 ? 1 : 0;
  const TmpEstimate tmp = estimate_tmp(trace);
  r.tmp_abs = tmp.tmp_abs;
  r.tmp_abs_ci = binomial_halfwidth(c.missed, r.total_slots, method);
  if (c.n_on > 0) {
    r.edp = *estimate_edp(trace);
    r.tdp = *estimate_tdp(trace);
    r.tmp_on = 1.0 - r.tdp;
    r.edp_ci = binomial_halfwidth(c.ideal, c.n_on, method);
    r.tdp_ci = binomial_halfwidth(c.detected, c.n_on, method);
    r.tmp_on_ci = r.tdp_ci;
  }
  return r;
}

MetricsReport aggregate_over_drops(std::span<const MetricsReport> reports,
                                   DropWeighting weighting, CiMethod method) {
  if (reports.empty()) throw std::invalid_argument("aggregate_over_drops: no reports");
  MetricsReport out;
  out.scenario_id = reports.front().scenario_id;
  out.aggregate = true;
  out.drops = 0;
  for (const auto& r : reports) {
    if (r.scenario_id != out.scenario_id) {
      throw std::invalid_argument("aggregate_over_drops: mixed scenario identifiers '" +
                                  out.scenario_id + "' and '" + r.scenario_id + "'");
    }
    out.drops += r.drops;
    out.drops_without_on += r.drops_without_on;
    out.n_on += r.n_on;
    out.total_slots += r.total_slots;
    out.n_ideal_detected += r.n_ideal_detected;
    out.n_detected += r.n_detected;
    out.n_missed += r.n_missed;
  }

  if (reports.size() == 1) {
    MetricsReport single = reports.front();
    single.aggregate = true;
    return single;
  }

  if (weighting == DropWeighting::by_n_on) {
    if (out.n_on > 0) {
      out.edp = static_cast<double>(out.n_ideal_detected) / static_cast<double>(out.n_on);
      out.tdp = static_cast<double>(out.n_detected) / static_cast<double>(out.n_on);
      out.tmp_on = 1.0 - out.tdp;
      out.edp_ci = binomial_halfwidth(out.n_ideal_detected, out.n_on, method);
      out.tdp_ci = binomial_halfwidth(out.n_detected, out.n_on, method);
      out.tmp_on_ci = out.tdp_ci;
    }
    if (out.total_slots > 0) {
      out.tmp_abs = static_cast<double>(out.n_missed) / static_cast<double>(out.total_slots);
      out.tmp_abs_ci = binomial_halfwidth(out.n_missed, out.total_slots, method);
    }
    return out;
  }

  std::vector<double> edp, tdp, tmp_abs;
  for (const auto& r : reports) {
    if (r.conditional_defined()) {
      edp.push_back(r.edp);
      tdp.push_back(r.tdp);
    }
    if (r.tmp_abs == r.tmp_abs) tmp_abs.push_back(r.tmp_abs);
  }
  const MeanSe e = mean_with_halfwidth(edp);
  const MeanSe d = mean_with_halfwidth(tdp);
  const MeanSe a = mean_with_halfwidth(tmp_abs);
  out.edp = e.mean;
  out.edp_ci = e.halfwidth;
  out.tdp = d.mean;
  out.tdp_ci = d.halfwidth;
  out.tmp_on = 1.0 - out.tdp;
  out.tmp_on_ci = d.halfwidth;
  out.tmp_abs = a.mean;
  out.tmp_abs_ci = a.halfwidth;
  return out;
}

}  // namespace larsnet
