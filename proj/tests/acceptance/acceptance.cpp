// Acceptance run over the reference scenario. Prints one PASS/FAIL line per
// criterion followed by indented detail, and exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support/metric_oracle.hpp"

#include "larsnet/antennas.hpp"
#include "larsnet/commands.hpp"
#include "larsnet/config.hpp"
#include "larsnet/link.hpp"
#include "larsnet/metrics.hpp"
#include "larsnet/montecarlo.hpp"
#include "larsnet/propagation.hpp"
#include "larsnet/sensing.hpp"

using namespace larsnet;
namespace fs = std::filesystem;

namespace {

constexpr double kZ95 = 1.959963984540054;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> detail;

  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    detail.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { detail.push_back("     " + what); }
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

void report(int number, const std::string& title, const Verdict& v) {
  std::cout << "criterion " << number << ' ' << (v.pass ? "PASS" : "FAIL") << ": " << title
            << '\n';
  for (const auto& d : v.detail) std::cout << "    " << d << '\n';
  std::cout.flush();
}

std::size_t workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

ScenarioConfig reference_config() {
  return load_config(fs::path(LARSNET_SOURCE_DIR) / "config" / "paper_defaults.json");
}

// Criteria 1 and 2 share the tri-sector sweep.
struct SweepRun {
  std::vector<SweepPoint> points;
  double seconds = 0.0;
};

SweepRun tri_sector_sweep(const ScenarioConfig& c) {
  const auto start = Clock::now();
  SweepRun run;
  run.points = run_sweep({c.isd_m, c.drops, &c, ComparisonMode::network},
                         {workers(), nullptr});
  run.seconds = seconds_since(start);
  return run;
}

const MetricsReport& at_isd(const SweepRun& run, double isd) {
  for (const auto& p : run.points) {
    if (p.isd_m == isd) return *p.network;
  }
  throw std::runtime_error("ISD " + std::to_string(isd) + " not in the sweep");
}

Verdict criterion1(const ScenarioConfig& c, const SweepRun& tri) {
  Verdict v;
  const MetricsReport& t = at_isd(tri, 2000.0);
  v.expect(t.edp >= 0.88, fmt("tri-sector ISD 2000: EDP %.4f +/- %.4f >= 0.88 (%zu drops, T = %zu)",
                              t.edp, t.edp_ci, t.drops, c.slots.num_slots));

  ScenarioConfig omni = c;
  omni.sensor.mode = AntennaMode::omni;
  const auto start = Clock::now();
  const auto points =
      run_sweep({{1000.0}, omni.drops, &omni, ComparisonMode::network}, {workers(), nullptr});
  const double omni_seconds = seconds_since(start);
  const MetricsReport& o = *points.front().network;
  v.expect(o.edp >= 0.88,
           fmt("omni ISD 1000: EDP %.4f +/- %.4f >= 0.88 (%zu drops)", o.edp, o.edp_ci, o.drops));
  v.note(fmt("omni cell %.1f s; full tri-sector sweep of %zu points %.1f s on %zu worker(s)",
             omni_seconds, tri.points.size(), tri.seconds, workers()));
  return v;
}

Verdict criterion2(const SweepRun& tri) {
  Verdict v;
  for (const auto& p : tri.points) {
    const MetricsReport& r = *p.network;
    if (p.isd_m <= 2000.0) {
      v.expect(r.edp >= 0.95, fmt("ISD %.0f: EDP %.4f >= 0.95", p.isd_m, r.edp));
    }
    v.expect(r.tdp < r.edp, fmt("ISD %.0f: TDP %.4f < EDP %.4f", p.isd_m, r.tdp, r.edp));
    v.expect(r.tmp_on == 1.0 - r.tdp && r.tmp_on + r.tdp == 1.0,
             fmt("ISD %.0f: TMP_ON %.17g == 1 - TDP", p.isd_m, r.tmp_on));
  }
  return v;
}

Verdict criterion3(const ScenarioConfig& c) {
  Verdict v;
  const auto start = Clock::now();
  const auto rows =
      run_single_vs_network(c.city_areas_km2, c.isd_m, c.drops, c, {workers(), nullptr});
  const double seconds = seconds_since(start);

  bool paired = true;
  for (const auto& r : rows) paired = paired && r.network.edp >= r.single.edp;
  v.expect(paired, fmt("network EDP >= single EDP on all %zu (city, ISD) rows", rows.size()));

  auto row = [&](double area, double isd) -> const ComparisonRow& {
    for (const auto& r : rows) {
      if (r.city_area_km2 == area && r.isd_m == isd) return r;
    }
    throw std::runtime_error("missing comparison row");
  };
  const double smallest = *std::min_element(c.city_areas_km2.begin(), c.city_areas_km2.end());
  const double largest = *std::max_element(c.city_areas_km2.begin(), c.city_areas_km2.end());
  for (double isd : c.isd_m) {
    const MetricsReport& s = row(smallest, isd).single;
    const MetricsReport& l = row(largest, isd).single;
    const double sigma = std::hypot(s.edp_ci / kZ95, l.edp_ci / kZ95);
    v.expect(s.edp - l.edp > 2.0 * sigma,
             fmt("ISD %.0f: single EDP %.0f km2 %.4f vs %.0f km2 %.4f, gap %.4f > 2 sigma %.4f",
                 isd, smallest, s.edp, largest, l.edp, s.edp - l.edp, 2.0 * sigma));
  }
  for (double area : c.city_areas_km2) {
    const ComparisonRow& r = row(area, 1000.0);
    v.expect(r.network.edp - r.single.edp >= 0.2,
             fmt("%.0f km2 ISD 1000: network %.4f - single %.4f >= 0.2", area, r.network.edp,
                 r.single.edp));
  }
  v.expect(seconds < 600.0, fmt("full comparison %.1f s < 600 s on %zu worker(s)", seconds,
                                workers()));
  return v;
}

Verdict criterion4() {
  Verdict v;
  std::mt19937_64 rng(20250101);
  std::size_t bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const oracle::RandomTrace r = oracle::random_trace(rng);
    const SlotTrace t = build_trace(r.activity, r.ideal, r.sensing, r.k);
    bad += !oracle::check_trace(t, oracle::expected_counts(r.activity, r.ideal, r.sensing, r.k));
  }
  v.expect(bad == 0, fmt("1000 random traces: %zu violate an identity or the oracle", bad));

  std::size_t unequal = 0, checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const oracle::RandomTrace r = oracle::random_trace(rng, 1.0);
    const SlotTrace t = build_trace(r.activity, r.ideal, r.sensing, r.k);
    if (t.n_on() == 0) continue;
    ++checked;
    unequal += *estimate_tdp(t) != *estimate_edp(t);
  }
  v.expect(unequal == 0, fmt("d_s = 1: TDP == EDP on %zu traces", checked));

  const oracle::CheckTally tally = oracle::exhaustive_check(3, 4);
  v.expect(tally.failures == 0 && tally.traces > 0,
           fmt("exhaustive <= 3 sensors, <= 4 slots, every K: %zu traces, %zu mismatches",
               tally.traces, tally.failures));
  return v;
}

Verdict criterion5() {
  Verdict v;
  for (std::size_t m : {1u, 2u, 5u}) {
    for (double ds : {0.1, 0.2, 0.5}) {
      SensorSet sensors;
      for (std::size_t i = 0; i < m; ++i) {
        sensors.psd_dbm_per_mhz.push_back(-40.0);
        sensors.noise_stream_id.push_back(i);
        sensors.duty_stream_id.push_back(i);
      }
      SlotModel model;
      model.num_slots = 100'000;
      model.duty_cycle = ds;
      model.fusion_k = 1;
      const SlotTrace t = simulate_slots(sensors, -89.0, 0.0, model,
                                         DropStreams{5, m, static_cast<std::uint64_t>(ds * 100)});
      const double p = 1.0 - std::pow(1.0 - ds, static_cast<double>(m));
      const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(t.n_on()));
      const double tdp = *estimate_tdp(t);
      v.expect(std::abs(tdp - p) <= 3.0 * se,
               fmt("m = %zu, d_s = %.1f: TDP %.5f vs %.5f, |diff| %.5f <= 3 SE %.5f", m, ds, tdp,
                   p, std::abs(tdp - p), 3.0 * se));
    }
  }
  return v;
}

Verdict criterion6(const ScenarioConfig& c) {
  Verdict v;
  const double loss = fspl_db(1000.0, c.link.frequency_hz);
  const double g_inc = dish_gain(c.dish, 0.0, 0.0);
  const double g_bs = sector_gain(c.sensor.sector, 0.0, 0.0);
  const LinkResult r = evaluate_link(c.link, g_inc, loss, g_bs);
  v.expect(std::abs(loss - 109.65) <= 0.01, fmt("FSPL(1 km, 7.25 GHz) %.4f dB", loss));
  v.expect(std::abs(r.rx_power_dbm - (-31.25)) <= 0.02, fmt("P_rx %.4f dBm", r.rx_power_dbm));
  v.expect(std::abs(r.psd_dbm_per_mhz - (-46.02)) <= 0.02,
           fmt("PSD %.4f dBm/MHz", r.psd_dbm_per_mhz));
  return v;
}

Verdict criterion7(const ScenarioConfig& c) {
  Verdict v;
  constexpr double tol = 1e-9;
  const SectorPatternd& s = c.sensor.sector;
  const OmniPatternd& o = c.sensor.omni;
  const DishPatternd& d = c.dish;

  // Half-power points in each principal plane.
  bool half = true;
  for (double sign : {-1.0, 1.0}) {
    half = half && std::abs(sector_gain(s, sign * s.h_hpbw_deg / 2, 0.0) - (s.max_gain_dbi - 3)) < tol;
    half = half && std::abs(sector_gain(s, 0.0, sign * s.v_hpbw_deg / 2) - (s.max_gain_dbi - 3)) < tol;
    half = half && std::abs(omni_gain(o, sign * o.v_hpbw_deg / 2) - (o.max_gain_dbi - 3)) < tol;
    half = half && std::abs(dish_gain(d, sign * d.hpbw_deg / 2, 0.0) - (d.max_gain_dbi - 3)) < tol;
    half = half && std::abs(dish_gain(d, 0.0, sign * d.hpbw_deg / 2) - (d.max_gain_dbi - 3)) < tol;
  }
  v.expect(half, "3 dB below peak at HPBW/2 in both principal planes, all three patterns");

  std::size_t samples = 0, floor_bad = 0, peak_bad = 0, even_bad = 0;
  bool floors_reached = true;
  for (int az = -180; az <= 180; ++az) {
    for (int el = -90; el <= 90; ++el) {
      const double a = az, e = el;
      const bool origin = az == 0 && el == 0;
      const double gs = sector_gain(s, a, e);
      const double gd = dish_gain(d, a, e);
      samples += 2;
      floor_bad += gs < s.max_gain_dbi - s.front_to_back_db - tol;
      floor_bad += gd < d.max_gain_dbi - d.front_to_back_db - tol;
      peak_bad += origin ? (gs != s.max_gain_dbi) + (gd != d.max_gain_dbi)
                         : (gs >= s.max_gain_dbi) + (gd >= d.max_gain_dbi);
      even_bad += gs != sector_gain(s, -a, e) || gs != sector_gain(s, a, -e);
      even_bad += std::abs(gd - dish_gain(d, -a, e)) > tol;
    }
  }
  for (int el = -90; el <= 90; ++el) {
    const double g = omni_gain(o, double(el));
    ++samples;
    floor_bad += g < o.max_gain_dbi - o.sidelobe_floor_db - tol;
    peak_bad += el == 0 ? g != o.max_gain_dbi : g >= o.max_gain_dbi;
    even_bad += g != omni_gain(o, double(-el));
  }
  floors_reached = std::abs(sector_gain(s, 180.0, 0.0) - (s.max_gain_dbi - s.front_to_back_db)) < tol &&
                   std::abs(dish_gain(d, 180.0, 0.0) - (d.max_gain_dbi - d.front_to_back_db)) < tol &&
                   std::abs(omni_gain(o, 90.0) - (o.max_gain_dbi - o.sidelobe_floor_db)) < tol;
  v.expect(floor_bad == 0 && floors_reached,
           fmt("floors respected and attained over %zu grid samples", samples));
  v.expect(peak_bad == 0, "peak at zero offset only");
  v.expect(even_bad == 0, "azimuth and elevation evenness");
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict criterion8() {
  Verdict v;
  const fs::path root(LARSNET_TEST_TMP);
  const std::string config = (fs::path(LARSNET_SOURCE_DIR) / "config" / "paper_defaults.json").string();
  std::vector<std::string> csvs;
  for (int w : {1, 2, 3}) {
    const fs::path out = root / ("workers" + std::to_string(w));
    fs::remove_all(out);
    std::vector<std::string> args{"larsnet", "sweep", "--config", config, "--drops", "40",
                                  "--seed", "11", "--workers", std::to_string(w),
                                  "--output", out.string(), "--quiet"};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream sink_out, sink_err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), sink_out, sink_err);
    v.expect(code == kExitOk, fmt("sweep with %d worker(s) exits %d", w, code));
    csvs.push_back(slurp(out / "sweep.csv"));
  }
  const bool same = !csvs.front().empty() && csvs[0] == csvs[1] && csvs[1] == csvs[2];
  v.expect(same, fmt("sweep.csv identical at 1, 2 and 3 workers (%zu bytes)", csvs.front().size()));
  return v;
}

}  // namespace

int main() {
  try {
    const ScenarioConfig c = reference_config();
    std::cout << "reference scenario, " << c.drops << " drops, " << c.slots.num_slots
              << " slots, " << workers() << " worker(s)\n";
    bool all = true;
    auto run = [&](int n, const std::string& title, const Verdict& v) {
      report(n, title, v);
      all = all && v.pass;
    };
    const SweepRun tri = tri_sector_sweep(c);
    run(1, "EDP at the required densities (FSPL)", criterion1(c, tri));
    run(2, "ISD sweep trends", criterion2(tri));
    run(3, "network versus single centre sensor", criterion3(c));
    run(4, "metric identities and exhaustive enumeration", criterion4());
    run(5, "duty-cycle closed form", criterion5());
    run(6, "link-budget reference values", criterion6(c));
    run(7, "antenna pattern properties on a 1 degree grid", criterion7(c));
    run(8, "sweep determinism across worker counts", criterion8());
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << '\n';
    return 2;
  }
}
