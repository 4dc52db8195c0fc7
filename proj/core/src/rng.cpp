#include "shapelab/rng.hpp"

#include <cmath>

namespace shapelab {

using detail::counter_draw;
using detail::mix64;

MasterSeed substream(MasterSeed seed, std::string_view label) {
    // FNV-1a over the label, then mixed into the parent seed.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : label) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return MasterSeed{mix64(seed.v ^ mix64(h))};
}

std::uint64_t particle_key(MasterSeed paths_seed, const ParticleId& id) {
    std::uint64_t k = mix64(paths_seed.v ^ mix64(detail::pack_site(id.origin)));
    return mix64(k ^ (0x9E3779B97F4A7C15ULL * (id.index + 1)));
}

Jump peek_jump(const PathStream& stream, double rate, int d) {
    std::uint64_t w = counter_draw(stream.key, 2 * stream.cursor);
    std::uint64_t r = counter_draw(stream.key, 2 * stream.cursor + 1);
    Jump j;
    j.wait = -std::log(detail::u01_open_closed(w)) / rate;
    j.dir_index = static_cast<int>(r % static_cast<std::uint64_t>(2 * d));
    return j;
}

Jump next_jump(PathStream& stream, double rate, int d) {
    Jump j = peek_jump(stream, rate, d);
    ++stream.cursor;
    return j;
}

int initial_count(MasterSeed init_seed, const LatticePoint& x, double mu_a) {
    std::uint64_t key = mix64(init_seed.v ^ mix64(detail::pack_site(x)));
    double u = detail::u01_closed_open(counter_draw(key, 0));
    // Inversion by sequential search; fine for the moderate mu_a this
    // artifact runs at.
    double p = std::exp(-mu_a);
    double cum = p;
    int k = 0;
    while (u >= cum && k < 1100) {
        ++k;
        p *= mu_a / k;
        cum += p;
    }
    return k;
}

}  // namespace shapelab
