#include "lts/series.hpp"

#include <cmath>

namespace lts {

Block Block::from_series(const TransSeries& f, int start_coord, Positivity cls) {
    Block b;
    b.depth = f.depth();
    b.start_coord = start_coord;
    b.cls = cls;
    for (auto& [z, blk] : f.blocks()) {
        if (z != Q(0)) fail(ErrorKind::shape, "block expects a pure l-series at z^0");
        b.terms = blk.terms;
        b.frontier = blk.frontier;
    }
    if (f.zf() && *f.zf() <= Q(0)) b.frontier = LBound::neg();
    b.validate();
    return b;
}

TransSeries Block::to_series(const TruncationGrid& g) const {
    TransSeries s(g);
    for (auto& [k, c] : terms) s.add_term({Q(0), k}, c);
    s.lower_block_frontier(Q(0), frontier);
    s.normalize();
    return s;
}

bool Block::belongs() const {
    for (auto& [k, c] : terms) {
        for (int i = 1; i < start_coord; ++i)
            if (k.e[i - 1]) return false;
        if (k.used_depth() > depth) return false;
        if (cls == Positivity::b_m_plus && k.e[start_coord - 1] < 1) return false;
        if (cls == Positivity::b_ge_m_plus && !(LKey{} < k)) return false;
    }
    return true;
}

void Block::validate() const {
    if (depth < 1 || depth > kMaxDepth) fail(ErrorKind::depth_overflow, "block depth out of range");
    if (start_coord < 1 || start_coord > depth) fail(ErrorKind::domain, "block start coordinate out of range");
    if (!belongs()) fail(ErrorKind::domain, "block term outside its algebra");
}

Block D_m(const Block& r, int m) {
    if (m < r.start_coord || m > r.depth) fail(ErrorKind::domain, "D_m needs a block in l_m..l_K");
    for (auto& [k, c] : r.terms)
        for (int i = 1; i < m; ++i)
            if (k.e[i - 1]) fail(ErrorKind::domain, "D_m applied to a term with a lower coordinate");
    Block out = r;
    out.terms.clear();
    out.start_coord = m;
    LKey e = LKey::unit(m);
    for (auto& [k, c] : r.terms) {
        std::int32_t n = k.e[m - 1];
        if (n) out.terms[k + e] += c * Coeff(long(n));
    }
    out.frontier = r.frontier + e;
    out.cls = Positivity::unrestricted;
    return out;
}

std::optional<std::int32_t> ord_ell(const Block& r, int m) {
    std::optional<std::int32_t> best;
    for (auto& [k, c] : r.terms)
        if (!c.is_zero() && r.frontier.above(k) && (!best || k.e[m - 1] < *best)) best = k.e[m - 1];
    return best;
}

Distance dist_m(const Block& r, const Block& s, int m) {
    Block d = r;
    d.frontier = min(r.frontier, s.frontier);
    for (auto& [k, c] : s.terms) d.terms[k] -= c;
    std::erase_if(d.terms, [&](auto& kv) { return kv.second.is_zero() || !d.frontier.above(kv.first); });
    Distance out;
    auto o = ord_ell(d, m);
    if (!o) {
        out.indistinguishable = true;
        return out;
    }
    out.order = Q(*o);
    out.value = std::ldexp(1.0, -*o);
    return out;
}

} // namespace lts
