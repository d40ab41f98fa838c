#include <atomic>
#include <cmath>

#include "doctest.h"

#include "larsnet/montecarlo.hpp"
#include "larsnet/sensing.hpp"

using namespace larsnet;

namespace {

ScenarioConfig small_scenario() {
  ScenarioConfig c;
  c.slots.num_slots = 500;
  c.drops = 30;
  return c;
}

bool same_report(const MetricsReport& a, const MetricsReport& b) {
  auto same = [](double x, double y) { return (x != x && y != y) || x == y; };
  return same(a.edp, b.edp) && same(a.tdp, b.tdp) && same(a.tmp_on, b.tmp_on) &&
         same(a.tmp_abs, b.tmp_abs) && same(a.edp_ci, b.edp_ci) && same(a.tdp_ci, b.tdp_ci) &&
         a.n_on == b.n_on && a.n_detected == b.n_detected && a.drops == b.drops;
}

}  // namespace

TEST_CASE("parallel_for visits every index once") {
  for (std::size_t workers : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  for (std::size_t workers : {1u, 4u}) {
    try {
      parallel_for(100, workers, [](std::size_t i) {
        if (i == 17 || i == 60) throw std::runtime_error("fail " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "fail 17");
    }
  }
}

TEST_CASE("sweep results do not depend on the worker count") {
  const ScenarioConfig c = small_scenario();
  const Sweep sweep{{1000.0, 2500.0}, 24, &c, ComparisonMode::both};
  const auto one = run_sweep(sweep, {1, nullptr});
  const auto three = run_sweep(sweep, {3, nullptr});
  REQUIRE(one.size() == 2);
  REQUIRE(three.size() == 2);
  for (std::size_t p = 0; p < 2; ++p) {
    CHECK(one[p].isd_m == three[p].isd_m);
    CHECK(same_report(*one[p].network, *three[p].network));
    CHECK(same_report(*one[p].single, *three[p].single));
  }
}

TEST_CASE("different seeds give different drops") {
  ScenarioConfig a = small_scenario();
  ScenarioConfig b = a;
  b.seed = a.seed + 1;
  const auto ra = run_sweep({{2500.0}, 24, &a, ComparisonMode::network});
  const auto rb = run_sweep({{2500.0}, 24, &b, ComparisonMode::network});
  CHECK(ra[0].network->n_on != rb[0].network->n_on);
}

TEST_CASE("noise off: per-drop EDP is 0 or 1 and equals any-site detection") {
  ScenarioConfig c = small_scenario();
  c.link.noise_sigma_db = 0.0;
  const auto model = make_propagation_model(c.propagation);
  const DropRegion region = DropRegion::square(c.area.side_length_m);
  const Deployment dep = generate_hex_deployment(region, 3000.0, c.bs_height_m, c.sensor.mode);
  std::size_t detected_drops = 0;
  std::vector<MetricsReport> reports;
  const std::size_t drops = 200;
  for (std::size_t d = 0; d < drops; ++d) {
    const DropStreams streams{c.seed, 0, d};
    const DropOutcome o = run_drop(c, dep, region, *model, streams, true, false);
    REQUIRE(o.network);
    CHECK((o.network->edp == 0.0 || o.network->edp == 1.0));
    const Eigen::ArrayXXd table = sector_psd_table(dep, Emitter{c.dish, o.incumbent}, c.sensor,
                                                   c.link, *model, streams);
    bool any = false;
    for (Eigen::Index s = 0; s < table.cols(); ++s) {
      const Eigen::ArrayXd col = table.col(s);
      any = any || per_site_indicator(std::span<const double>(col.data(), col.size()),
                                      c.link.threshold_dbm_per_mhz);
    }
    CHECK(o.network->edp == (any ? 1.0 : 0.0));
    detected_drops += any;
    reports.push_back(*o.network);
  }
  const MetricsReport agg = aggregate_over_drops(reports);
  CHECK(agg.edp == doctest::Approx(static_cast<double>(detected_drops) / drops).epsilon(1e-12));
  CHECK(detected_drops > 0);
  CHECK(detected_drops < drops);
}

TEST_CASE("noise off: EDP never increases along nested lattices with common drops") {
  // ISD 500 k for k = 1, 2, 4, 8 are nested sublattices, so with the same
  // incumbent every detecting sparse site also exists in the denser layout.
  ScenarioConfig c = small_scenario();
  c.link.noise_sigma_db = 0.0;
  const auto model = make_propagation_model(c.propagation);
  const DropRegion region = DropRegion::square(c.area.side_length_m);
  std::vector<Deployment> deps;
  for (double isd : {500.0, 1000.0, 2000.0, 4000.0, 8000.0}) {
    deps.push_back(generate_hex_deployment(region, isd, c.bs_height_m, c.sensor.mode));
  }
  for (std::size_t d = 0; d < 60; ++d) {
    const DropStreams streams{c.seed, 0, d};
    double previous = 1.0;
    for (const auto& dep : deps) {
      const double edp = run_drop(c, dep, region, *model, streams, true, false).network->edp;
      CHECK(edp <= previous);
      previous = edp;
    }
  }
}

TEST_CASE("noise off: aggregated EDP is non-increasing over ISD 500 to 3000") {
  // Drops differ between points, so this is statistical; the smallest true
  // step on this grid is about 0.045, roughly 4 standard errors here.
  ScenarioConfig c = small_scenario();
  c.link.noise_sigma_db = 0.0;
  c.slots.num_slots = 200;
  const auto points = run_sweep({{500.0, 1000.0, 1500.0, 2000.0, 2500.0, 3000.0}, 1500, &c,
                                 ComparisonMode::network});
  for (std::size_t p = 1; p < points.size(); ++p) {
    CAPTURE(points[p].isd_m);
    CHECK(points[p].network->edp <= points[p - 1].network->edp);
  }
}

TEST_CASE("paired drops: the network detects whenever the centre site does") {
  ScenarioConfig c = small_scenario();
  const auto model = make_propagation_model(c.propagation);
  const DropRegion region = DropRegion::disk_with_area(71e6);
  const Deployment dep = generate_hex_deployment(region, 1500.0, c.bs_height_m, c.sensor.mode);
  for (std::size_t d = 0; d < 80; ++d) {
    const DropOutcome o = run_drop(c, dep, region, *model, DropStreams{c.seed, 3, d}, true, true);
    REQUIRE(o.network);
    REQUIRE(o.single);
    CHECK(o.network->n_on == o.single->n_on);
    CHECK(o.network->n_ideal_detected >= o.single->n_ideal_detected);
    CHECK(o.network->n_detected >= o.single->n_detected);
    CHECK(region.contains(o.incumbent.x_m, o.incumbent.y_m));
  }
}

TEST_CASE("single-vs-network comparison rows") {
  ScenarioConfig c = small_scenario();
  const auto rows = run_single_vs_network({71.0, 21.0}, {1000.0, 2000.0}, 20, c);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].city_area_km2 == 71.0);
  CHECK(rows[3].isd_m == 2000.0);
  for (const auto& r : rows) {
    CHECK(r.network.edp >= r.single.edp);
    CHECK(r.drops == 20);
    CHECK(r.seed == c.seed);
    CHECK(r.site_count >= 1);
  }
  CHECK_THROWS(run_single_vs_network({}, {1000.0}, 20, c));
}

TEST_CASE("errors carry the offending ISD") {
  ScenarioConfig c = small_scenario();
  c.slots.fusion_k = 50;
  try {
    run_sweep({{500.0, 3000.0}, 4, &c, ComparisonMode::network});
    FAIL("expected SimulationError");
  } catch (const SimulationError& e) {
    CHECK(e.isd_m() == 3000.0);
  }
  ScenarioConfig ok = small_scenario();
  CHECK_THROWS_AS(run_sweep({{20'000.0}, 4, &ok, ComparisonMode::network}), SimulationError);
  CHECK_THROWS(run_sweep({{}, 4, &ok, ComparisonMode::network}));
  CHECK_THROWS(run_sweep({{1000.0}, 0, &ok, ComparisonMode::network}));
}

TEST_CASE("density search: linear scan and bisection agree") {
  ScenarioConfig c = small_scenario();
  c.link.noise_sigma_db = 0.0;
  c.slots.num_slots = 200;
  c.drops = 1500;
  const std::vector<double> grid{500.0, 1000.0, 1500.0, 2000.0, 2500.0, 3000.0};
  const DensityResult linear = find_min_density(c, 0.9, grid, SearchStrategy::linear_scan);
  const DensityResult binary = find_min_density(c, 0.9, grid, SearchStrategy::binary_search);
  CHECK(linear.evaluated.size() == grid.size());
  CHECK(binary.evaluated.size() < grid.size());
  bool monotone = true;
  for (std::size_t i = 1; i < linear.evaluated.size(); ++i) {
    monotone = monotone && linear.evaluated[i].second <= linear.evaluated[i - 1].second;
  }
  REQUIRE(monotone);
  CHECK(linear.isd_m == binary.isd_m);
  CHECK(linear.site_fraction == binary.site_fraction);

  const DensityResult vacuous = find_min_density(c, 0.0, grid);
  REQUIRE(vacuous.isd_m);
  CHECK(*vacuous.isd_m == 3000.0);
  const DensityResult impossible = find_min_density(c, 1.0, {2500.0, 3000.0});
  CHECK_FALSE(impossible.isd_m);
  CHECK_THROWS(find_min_density(c, 0.9, {}));
  CHECK_THROWS(find_min_density(c, 0.9, {2000.0, 1000.0}));
}

TEST_CASE("sensing-site fraction") {
  CHECK(sensing_site_fraction(2000.0) == 0.0625);
  CHECK(sensing_site_fraction(1000.0) == 0.25);
  CHECK(sensing_site_fraction(2500.0) == doctest::Approx(0.04));
}
