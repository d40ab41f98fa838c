#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "larsnet/geometry.hpp"
#include "larsnet/random.hpp"

namespace larsnet {

inline constexpr double kSpeedOfLight = 299'792'458.0;

template <typename Scalar>
Scalar fspl_db(Scalar distance_m, Scalar frequency_hz) {
  if (!(distance_m > 0) || !(frequency_hz > 0)) {
    throw std::invalid_argument("fspl: distance and frequency must be positive");
  }
  return Scalar(20) * std::log10(Scalar(4) * std::numbers::pi_v<Scalar> * distance_m *
                                 frequency_hz / Scalar(kSpeedOfLight));
}

// Element-wise FSPL over an array of distances (no argument checking).
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> fspl_db(
    const Eigen::ArrayBase<Derived>& distance_m, typename Derived::Scalar frequency_hz) {
  using Scalar = typename Derived::Scalar;
  const Scalar k = Scalar(4) * std::numbers::pi_v<Scalar> * frequency_hz / Scalar(kSpeedOfLight);
  return Scalar(20) * (k * distance_m).log10();
}

// FSPL(1 m) + 10 n log10(d) + N(0, sigma^2). With n = 2 and sigma = 0 this
// is free space exactly.
double log_distance_stand_in(double distance_m, double frequency_hz, double exponent,
                             double shadowing_sigma_db, Engine& stream);

class PropagationModel {
 public:
  virtual ~PropagationModel() = default;
  [[nodiscard]] virtual std::string id() const = 0;
  // `stream` is only consumed by stochastic models.
  [[nodiscard]] virtual double path_loss_db(const PairGeometry& pair, double frequency_hz,
                                            Engine& stream) const = 0;
  [[nodiscard]] virtual bool stochastic() const { return false; }
};

class FreeSpaceModel final : public PropagationModel {
 public:
  [[nodiscard]] std::string id() const override { return "fspl"; }
  [[nodiscard]] double path_loss_db(const PairGeometry& pair, double frequency_hz,
                                    Engine& stream) const override;
};

class LogDistanceModel final : public PropagationModel {
 public:
  LogDistanceModel(double exponent, double shadowing_sigma_db);
  [[nodiscard]] std::string id() const override { return "log_distance"; }
  [[nodiscard]] double path_loss_db(const PairGeometry& pair, double frequency_hz,
                                    Engine& stream) const override;
  [[nodiscard]] bool stochastic() const override { return shadowing_sigma_db_ > 0.0; }
  [[nodiscard]] double exponent() const { return exponent_; }
  [[nodiscard]] double shadowing_sigma_db() const { return shadowing_sigma_db_; }

 private:
  double exponent_;
  double shadowing_sigma_db_;
};

struct PropagationConfig {
  std::string model = "fspl";
  double exponent = 2.0;
  double shadowing_sigma_db = 0.0;
  bool operator==(const PropagationConfig&) const = default;
};

using PropagationFactory =
    std::function<std::unique_ptr<PropagationModel>(const PropagationConfig&)>;

// Registry of model identifiers; "fspl" and "log_distance" are built in.
// External models (e.g. a terrain-aware ITM port) register under their own id.
void register_propagation_model(const std::string& id, PropagationFactory factory);
[[nodiscard]] bool has_propagation_model(const std::string& id);
[[nodiscard]] std::vector<std::string> propagation_model_ids();
std::unique_ptr<PropagationModel> make_propagation_model(const PropagationConfig& config);

}  // namespace larsnet
