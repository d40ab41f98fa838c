#include "larsnet/random.hpp"

namespace larsnet {

namespace {

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

// Hashing the path into one word and using the engine's own integer seeding is
// far cheaper than seed_seq, which matters with one stream per sensor per drop.
Engine make_stream(std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix(path.size());
  for (std::uint64_t v : path) h = mix(h ^ mix(v));
  return Engine(h);
}

}  // namespace larsnet
