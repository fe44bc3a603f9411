#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace slicewb {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a; stable across platforms, used for stream names and
/// scenario hashes.
std::uint64_t fnv1a(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Independent generator for a named substream of a run seed, e.g.
/// make_stream(seed, "env") or make_stream(seed, "agent/slice-2").
Rng make_stream(std::uint64_t seed, std::string_view name);

}  // namespace slicewb
