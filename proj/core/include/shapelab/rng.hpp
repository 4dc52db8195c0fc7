#pragma once

// Counter-based randomness: every draw is a pure function of
// (master seed, owner, counter).  Nothing is stored, so any number of
// coupled process variants can replay the same particle paths without
// keeping them in memory, and any draw can be re-queried at random.
//
// The stream algorithm is pinned (see kStreamAlgoId): two chained
// splitmix64 finalizer rounds keyed by owner and counter, exponential
// waits by inverse CDF on the unit double, jump directions by an
// integer draw mod 2d in the fixed order (-e1,+e1,...,-ed,+ed).

#include <cstdint>
#include <string_view>

#include "shapelab/geometry.hpp"

namespace shapelab {

inline constexpr const char* kStreamAlgoId = "splitmix64-ctr/v1";

struct MasterSeed {
    std::uint64_t v{0};
    bool operator==(const MasterSeed&) const = default;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// One 64-bit draw from the stream (key, ctr).
inline std::uint64_t counter_draw(std::uint64_t key, std::uint64_t ctr) {
    std::uint64_t z = mix64(key + 0x9E3779B97F4A7C15ULL * ctr);
    return mix64(z ^ key ^ 0xD1B54A32D192ED03ULL);
}

/// Uniform on (0,1], full 53-bit resolution.
inline double u01_open_closed(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

/// Uniform on [0,1).
inline double u01_closed_open(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Pack lattice coordinates into a 64-bit key, 16 bits per coordinate.
/// Coordinates must fit in int16; simulation boxes stay far below that.
inline std::uint64_t pack_coords(const std::int32_t* c, int d) {
    std::uint64_t k = 0;
    for (int i = 0; i < d; ++i)
        k |= (static_cast<std::uint64_t>(static_cast<std::uint16_t>(
                 static_cast<std::int16_t>(c[i])))
              << (16 * i));
    return k;
}

inline std::uint64_t pack_site(const LatticePoint& x) {
    return pack_coords(x.c.data(), x.dim);
}

inline LatticePoint unpack_site(std::uint64_t key, int d) {
    LatticePoint p = LatticePoint::origin(d);
    for (int i = 0; i < d; ++i)
        p.c[i] = static_cast<std::int16_t>(
            static_cast<std::uint16_t>(key >> (16 * i)));
    return p;
}

}  // namespace detail

/// Collision-resistant child seed; distinct labels give independent streams.
MasterSeed substream(MasterSeed seed, std::string_view label);

struct ParticleId {
    LatticePoint origin;
    std::uint32_t index{0};

    bool operator==(const ParticleId&) const = default;
};

/// Stable per-particle stream key, identical across coupled processes.
std::uint64_t particle_key(MasterSeed paths_seed, const ParticleId& id);

struct PathStream {
    std::uint64_t key{0};
    std::uint64_t cursor{0};
};

inline PathStream make_path_stream(MasterSeed paths_seed, const ParticleId& id) {
    return PathStream{particle_key(paths_seed, id), 0};
}

struct Jump {
    double wait;     // Exp(rate D) holding time, seconds
    int dir_index;   // in [0, 2d)
};

/// The k-th jump of a path, k = stream.cursor; advances the cursor.
Jump next_jump(PathStream& stream, double rate, int d);

/// Same draw without advancing (random access).
Jump peek_jump(const PathStream& stream, double rate, int d);

/// Deterministic Poisson(mu_a) count for a site, independent across sites.
int initial_count(MasterSeed init_seed, const LatticePoint& x, double mu_a);

}  // namespace shapelab
