#include "larsnet/propagation.hpp"

#include <map>
#include <mutex>

namespace larsnet {

double log_distance_stand_in(double distance_m, double frequency_hz, double exponent,
                             double shadowing_sigma_db, Engine& stream) {
  if (!(exponent >= 2.0)) throw std::invalid_argument("log-distance: exponent must be >= 2");
  if (!(shadowing_sigma_db >= 0.0)) {
    throw std::invalid_argument("log-distance: shadowing sigma must be >= 0");
  }
  if (!(distance_m > 0.0)) throw std::invalid_argument("log-distance: distance must be positive");
  double loss = fspl_db(1.0, frequency_hz) + 10.0 * exponent * std::log10(distance_m);
  if (shadowing_sigma_db > 0.0) {
    std::normal_distribution<double> shadow(0.0, shadowing_sigma_db);
    loss += shadow(stream);
  }
  return loss;
}

double FreeSpaceModel::path_loss_db(const PairGeometry& pair, double frequency_hz,
                                    Engine& /*stream*/) const {
  return fspl_db(pair.slant_distance_m, frequency_hz);
}

LogDistanceModel::LogDistanceModel(double exponent, double shadowing_sigma_db)
    : exponent_(exponent), shadowing_sigma_db_(shadowing_sigma_db) {
  if (!(exponent_ >= 2.0)) throw std::invalid_argument("log-distance: exponent must be >= 2");
  if (!(shadowing_sigma_db_ >= 0.0)) {
    throw std::invalid_argument("log-distance: shadowing sigma must be >= 0");
  }
}

double LogDistanceModel::path_loss_db(const PairGeometry& pair, double frequency_hz,
                                      Engine& stream) const {
  return log_distance_stand_in(pair.slant_distance_m, frequency_hz, exponent_,
                               shadowing_sigma_db_, stream);
}

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, PropagationFactory> factories;

  Registry() {
    factories["fspl"] = [](const PropagationConfig&) {
      return std::make_unique<FreeSpaceModel>();
    };
    factories["log_distance"] = [](const PropagationConfig& c) {
      return std::make_unique<LogDistanceModel>(c.exponent, c.shadowing_sigma_db);
    };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_propagation_model(const std::string& id, PropagationFactory factory) {
  if (id.empty() || !factory) throw std::invalid_argument("propagation registry: empty entry");
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.factories[id] = std::move(factory);
}

bool has_propagation_model(const std::string& id) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.factories.contains(id);
}

std::vector<std::string> propagation_model_ids() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> ids;
  for (const auto& [id, factory] : r.factories) ids.push_back(id);
  return ids;
}

std::unique_ptr<PropagationModel> make_propagation_model(const PropagationConfig& config) {
  PropagationFactory factory;
  {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.factories.find(config.model);
    if (it == r.factories.end()) {
      throw std::invalid_argument("unknown propagation model '" + config.model + "'");
    }
    factory = it->second;
  }
  return factory(config);
}

}  // namespace larsnet
