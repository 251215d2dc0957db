#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lobabc {

using Rng = std::mt19937_64;

// Independent stream keyed by (seed, path...). The same key always yields the
// same stream, so per-particle work is reproducible regardless of which worker
// thread executes it.
Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

double uniform01(Rng& rng);

}  // namespace lobabc
