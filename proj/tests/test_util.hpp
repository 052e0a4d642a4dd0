#ifndef LTS_TEST_UTIL_HPP
#define LTS_TEST_UTIL_HPP

#include "lts/parse.hpp"
#include "lts/series.hpp"

namespace lts::test {

inline TruncationGrid grid(int z_cap, int block_cap, int depth) {
    TruncationGrid g;
    g.z_cap = Q(z_cap);
    g.block_cap = block_cap;
    g.depth = depth;
    return g;
}

inline ExponentKey key(Q z, int l1 = 0, int l2 = 0, int l3 = 0) {
    ExponentKey k{z, {}};
    k.l.e[0] = l1;
    k.l.e[1] = l2;
    k.l.e[2] = l3;
    return k;
}

// agreement on every retained key below both frontiers
inline bool agree(const TransSeries& a, const TransSeries& b) { return sub(a, b).is_zero(); }

} // namespace lts::test

#endif
