#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"

#include "larsnet/output.hpp"
#include "larsnet/sensing.hpp"

using namespace larsnet;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
  const fs::path p = fs::path(LARSNET_TEST_TMP) / name;
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

PowerGrid field(const IncumbentDrop& inc, std::size_t n, const Deployment& dep = {}) {
  const auto model = make_propagation_model({});
  Deployment d = dep;
  if (d.sites.empty()) d.sites.push_back(BsSite{0, 0.0, 0.0, 25.0, {0.0}});
  return compute_power_grid(Area{10'000.0}, d, Emitter{DishPatternd{}, inc}, SensorAntenna{},
                            LinkBudgetParams{}, *model, n);
}

// Isotropic-probe PSD at horizontal distance r along the boresight ray.
double ray_value(double r) {
  const LinkBudgetParams link;
  const DishPatternd dish;
  const double el = rad_to_deg(std::atan2(-35.0, r));
  const double slant = std::hypot(r, 35.0);
  return to_psd(received_power(link, dish_gain(dish, 0.0, el), fspl_db(slant, 7.25e9), 0.0),
                30e6);
}

}  // namespace

TEST_CASE("grid covers the area edge to edge") {
  const PowerGrid g = field({100.0, 200.0, 60.0, 10.0}, 11);
  CHECK(g.x_at(0) == -5000.0);
  CHECK(g.x_at(10) == 5000.0);
  CHECK(g.y_at(5) == 0.0);
  CHECK(g.psd.allFinite());
  CHECK_THROWS(field({0.0, 0.0, 60.0, 0.0}, 1));
}

TEST_CASE("grid maximum lies on the boresight ray") {
  const double az = 30.0;
  const PowerGrid g = field({0.0, 0.0, 60.0, az}, 501);
  Eigen::Index row = 0, col = 0;
  const double best = g.psd.maxCoeff(&row, &col);
  const double x = g.x_at(static_cast<std::size_t>(col));
  const double y = g.y_at(static_cast<std::size_t>(row));
  const double off = std::abs(wrap_offset_deg(rad_to_deg(std::atan2(y, x)) - az));
  CHECK(off <= 1.85);

  // One-dimensional maximisation along the ray as the reference.
  double ray_best = -1e300, ray_arg = 0.0;
  for (double r = 1.0; r <= 5000.0; r += 0.5) {
    if (ray_value(r) > ray_best) {
      ray_best = ray_value(r);
      ray_arg = r;
    }
  }
  CHECK(best <= ray_best + 1e-9);
  CHECK(best >= ray_best - 0.5);
  CHECK(std::hypot(x, y) == doctest::Approx(ray_arg).epsilon(0.1));
}

TEST_CASE("PSD decreases along the ray beyond the mainlobe touchdown") {
  double previous = ray_value(1000.0);
  for (double r = 1010.0; r <= 7000.0; r += 10.0) {
    const double v = ray_value(r);
    CHECK(v < previous);
    previous = v;
  }
  // Same through the grid code on the +x axis.
  const PowerGrid g = field({0.0, 0.0, 60.0, 0.0}, 101);
  for (std::size_t col = 61; col < 101; ++col) CHECK(g.psd(50, col) < g.psd(50, col - 1));
}

TEST_CASE("doubling resolution keeps coincident grid values") {
  const IncumbentDrop inc{-1234.0, 777.0, 60.0, 123.0};
  const PowerGrid coarse = field(inc, 51);
  const PowerGrid fine = field(inc, 101);
  for (std::size_t r = 0; r < 51; ++r) {
    for (std::size_t c = 0; c < 51; ++c) {
      CHECK(coarse.x_at(c) == fine.x_at(2 * c));
      CHECK(coarse.psd(r, c) == fine.psd(2 * r, 2 * c));
    }
  }
}

TEST_CASE("field is rotation-equivariant") {
  const std::size_t n = 61;
  const PowerGrid a = field({0.0, 0.0, 60.0, 20.0}, n);
  const PowerGrid b = field({0.0, 0.0, 60.0, 110.0}, n);
  double worst = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      worst = std::max(worst, std::abs(b.psd(c, n - 1 - r) - a.psd(r, c)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("site-interpolated grid reproduces site values") {
  const Deployment dep = generate_hex_deployment(Area{10'000.0}, 2500.0, 25.0,
                                                 AntennaMode::tri_sector);
  const IncumbentDrop inc{300.0, -400.0, 60.0, 75.0};
  const auto model = make_propagation_model({});
  GridOptions opt;
  opt.mode = GridMode::site_interpolated;
  // 2500 m sites land on grid coordinates when the spacing divides 2500.
  const PowerGrid g = compute_power_grid(Area{10'000.0}, dep, Emitter{DishPatternd{}, inc},
                                         SensorAntenna{}, LinkBudgetParams{}, *model, 41, opt);
  CHECK(g.psd.allFinite());
  const Eigen::ArrayXXd table = sector_psd_table(dep, Emitter{DishPatternd{}, inc}, SensorAntenna{},
                                                 LinkBudgetParams{}, *model, DropStreams{});
  for (std::size_t i = 0; i < dep.size(); ++i) {
    const auto col = static_cast<std::size_t>(std::lround((dep.sites[i].x_m + 5000.0) / 250.0));
    const auto row = static_cast<std::size_t>(std::lround((dep.sites[i].y_m + 5000.0) / 250.0));
    if (std::abs(g.x_at(col) - dep.sites[i].x_m) > 1e-9 ||
        std::abs(g.y_at(row) - dep.sites[i].y_m) > 1e-9) {
      continue;
    }
    CHECK(g.psd(row, col) == table.col(static_cast<Eigen::Index>(i)).maxCoeff());
  }
}

TEST_CASE("incumbent outside the area only warns") {
  std::ostringstream warn;
  const auto model = make_propagation_model({});
  Deployment dep;
  dep.sites.push_back(BsSite{0, 0.0, 0.0, 25.0, {0.0}});
  compute_power_grid(Area{10'000.0}, dep, Emitter{DishPatternd{}, {9000.0, 0.0, 60.0, 0.0}},
                     SensorAntenna{}, LinkBudgetParams{}, *model, 5, {}, &warn);
  CHECK(warn.str().find("outside") != std::string::npos);
}

TEST_CASE("grid CSV round-trips exactly and backs the same image") {
  const Deployment dep = generate_hex_deployment(Area{10'000.0}, 1000.0, 25.0,
                                                 AntennaMode::tri_sector);
  const IncumbentDrop inc{-200.0, 350.0, 60.0, 300.0};
  const PowerGrid g = field(inc, 120, dep);
  std::stringstream csv;
  write_grid_csv(csv, g);
  const std::string text = csv.str();
  CHECK(text.rfind("x_m,y_m,psd_dbm_per_mhz\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const PowerGrid back = read_grid_csv(csv);
  REQUIRE(back.resolution == g.resolution);
  CHECK((back.psd - g.psd).abs().maxCoeff() == 0.0);
  const ColorScale scale;
  CHECK(heatmap_image(back, dep, inc, scale) == heatmap_image(g, dep, inc, scale));

  std::istringstream bad("nope\n1,2,3\n");
  CHECK_THROWS(read_grid_csv(bad));
}

TEST_CASE("heatmap rendering is deterministic and writes a legend") {
  const fs::path dir = tmp_dir("heatmap");
  const Deployment dep = generate_hex_deployment(Area{10'000.0}, 1500.0, 25.0,
                                                 AntennaMode::tri_sector);
  const IncumbentDrop inc{0.0, 0.0, 60.0, 45.0};
  const PowerGrid g = field(inc, 200, dep);
  const Provenance prov{"0123456789abcdef", "fspl"};
  render_heatmap(g, dep, inc, dir / "a.png", {-140.0, -40.0}, prov);
  render_heatmap(g, dep, inc, dir / "b.png", {-140.0, -40.0}, prov);
  CHECK(slurp(dir / "a.png") == slurp(dir / "b.png"));
  const std::string legend = slurp(dir / "a.legend.json");
  CHECK(legend.find("\"color_min_dbm_per_mhz\": -140") != std::string::npos);
  CHECK(legend.find("0123456789abcdef") != std::string::npos);
  const PngContents png = read_png(dir / "a.png");
  CHECK(png.image.width() == 200);
  CHECK(png.text.at("provenance_hash") == "0123456789abcdef");
  CHECK(png.image == heatmap_image(g, dep, inc, {-140.0, -40.0}));
  CHECK_THROWS(render_heatmap(g, dep, inc, dir / "missing" / "x.png", {}, prov));
}

TEST_CASE("constant grid renders one field colour plus markers") {
  PowerGrid g;
  g.resolution = 100;
  g.half_extent_m = 5000.0;
  g.psd = Eigen::ArrayXXd::Constant(100, 100, -90.0);
  Deployment dep;
  dep.sites.push_back(BsSite{0, -3000.0, -3000.0, 25.0, {0.0}});
  const Image img = heatmap_image(g, dep, {2000.0, 2000.0, 60.0, 0.0}, {-140.0, -40.0});
  const Rgb fieldc = colormap(0.5);
  std::size_t field_px = 0, black = 0, red = 0;
  for (std::size_t y = 0; y < 100; ++y) {
    for (std::size_t x = 0; x < 100; ++x) {
      const Rgb c = img.at(x, y);
      field_px += c == fieldc;
      black += c == Rgb{0, 0, 0};
      red += c == Rgb{220, 20, 20};
    }
  }
  CHECK(field_px + black + red == 10'000);
  CHECK(black > 0);
  CHECK(red > 0);
}

TEST_CASE("500 x 500 heatmap at ISD 500 renders quickly") {
  const fs::path dir = tmp_dir("perf");
  const Deployment dep = generate_hex_deployment(Area{10'000.0}, 500.0, 25.0,
                                                 AntennaMode::tri_sector);
  const IncumbentDrop inc{0.0, 0.0, 60.0, 60.0};
  const auto start = std::chrono::steady_clock::now();
  const PowerGrid g = field(inc, 500, dep);
  render_heatmap(g, dep, inc, dir / "fig1.png", {}, {"h", "fspl"});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 5.0);
}

TEST_CASE("threshold map: cone along the boresight and metadata count") {
  const fs::path dir = tmp_dir("threshold");
  const Area area{10'000.0};
  const Deployment dep = generate_hex_deployment(area, 500.0, 25.0, AntennaMode::tri_sector);
  const IncumbentDrop inc{0.0, 0.0, 60.0, 0.0};
  const Emitter emitter{DishPatternd{}, inc};
  LinkBudgetParams link;
  link.noise_sigma_db = 0.0;
  const auto model = make_propagation_model({});
  const auto ind = site_indicators(dep, emitter, SensorAntenna{}, link, *model, DropStreams{});
  REQUIRE(ind.size() == dep.size());

  std::size_t count = 0;
  for (std::size_t i = 0; i < dep.size(); ++i) {
    const BsSite& s = dep.sites[i];
    const PairGeometry g = pair_geometry(inc, s);
    // Direct evaluation of the best-sector rule.
    double best = -1e300;
    for (double saz : s.sector_azimuths_deg) {
      const double prx = received_power(
          link, dish_gain_toward(emitter.dish, 0.0, g.azimuth_at_incumbent_deg, g.elevation_deg),
          fspl_db(g.slant_distance_m, 7.25e9), sector_gain(SectorPatternd{},
                                                           g.azimuth_at_sensor_deg - saz,
                                                           g.elevation_at_sensor_deg()));
      best = std::max(best, to_psd(prx, 30e6));
    }
    CHECK(ind[i] == (best >= -89.0 ? 1 : 0));
    count += ind[i];
    const double off = std::abs(wrap_offset_deg(g.azimuth_at_incumbent_deg));
    if (ind[i] && g.horizontal_distance_m > 2000.0) CHECK(off <= 10.0);
    if (s.y_m == 0.0 && s.x_m > 0.0) CHECK(ind[i] == 1);
  }
  CHECK(count > 0);
  CHECK(count < dep.size() / 2);

  render_threshold_map(area, dep, ind, inc, dir / "map.png", {"abc", "fspl"});
  const PngContents png = read_png(dir / "map.png");
  CHECK(png.text.at("indicator_count") == std::to_string(count));
  CHECK(png.text.at("site_count") == std::to_string(dep.size()));
  CHECK(png.image.width() == 800);
  // Site centres away from the incumbent marker carry their indicator colour.
  for (std::size_t i = 0; i < dep.size(); ++i) {
    const BsSite& s = dep.sites[i];
    if (std::hypot(s.x_m, s.y_m) < 1500.0) continue;
    const auto px = static_cast<std::size_t>((s.x_m + 5000.0) / 10'000.0 * 800.0);
    const auto py = static_cast<std::size_t>((5000.0 - s.y_m) / 10'000.0 * 800.0);
    if (px >= 800 || py >= 800) continue;
    const Rgb expected = ind[i] ? Rgb{0, 170, 0} : Rgb{0, 0, 0};
    CHECK(png.image.at(px, py) == expected);
  }
}

TEST_CASE("threshold map with no detections is single-coloured at sites") {
  const Area area{10'000.0};
  const Deployment dep = generate_hex_deployment(area, 2000.0, 25.0, AntennaMode::omni);
  const std::vector<std::uint8_t> none(dep.size(), 0);
  const Image img = threshold_map_image(area, dep, none, {4000.0, 4000.0, 60.0, 0.0});
  std::size_t green = 0;
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) green += img.at(x, y) == Rgb{0, 170, 0};
  }
  CHECK(green == 0);
  const std::vector<std::uint8_t> wrong(dep.size() + 1, 0);
  CHECK_THROWS(threshold_map_image(area, dep, wrong, {}));
}
