#include "airfed/rng.hpp"

namespace airfed {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

RandomStream seeded_rng(std::uint64_t seed, std::string_view stream_label) {
  const std::uint64_t label = fnv1a(stream_label);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(label), static_cast<std::uint32_t>(label >> 32)};
  return RandomStream(seq);
}

}  // namespace airfed
