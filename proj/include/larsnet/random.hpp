#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace larsnet {

using Engine = std::mt19937_64;

// Purpose tag mixed into every derived stream so that, for example, the
// noise and duty-cycle draws of one sensor never share a sequence.
enum class StreamKind : std::uint64_t {
  incumbent = 1,
  activity = 2,
  noise = 3,
  duty = 4,
  shadowing = 5,
  heatmap = 6,
};

// Deterministic engine for an arbitrary key path. Equal paths give equal
// sequences; the engine state depends on every element of the path.
Engine make_stream(std::initializer_list<std::uint64_t> path);

// Per-drop stream family: stream = f(master_seed, sweep_point, drop, kind, sub).
// `sub` identifies a sensor for per-sensor streams and is 0 otherwise.
struct DropStreams {
  std::uint64_t master_seed = 0;
  std::uint64_t point_index = 0;
  std::uint64_t drop_index = 0;

  [[nodiscard]] Engine stream(StreamKind kind, std::uint64_t sub = 0) const {
    return make_stream({master_seed, point_index, drop_index,
                        static_cast<std::uint64_t>(kind), sub});
  }
};

}  // namespace larsnet
