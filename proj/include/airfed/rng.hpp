#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace airfed {

using RandomStream = std::mt19937_64;

// Deterministic stream keyed by (seed, label). Draws taken from one label
// never shift the draws of another.
RandomStream seeded_rng(std::uint64_t seed, std::string_view stream_label);

}  // namespace airfed
