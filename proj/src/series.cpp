#include "lts/series.hpp"

#include <algorithm>
#include <cmath>

namespace lts {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::depth_overflow: return "depth-overflow";
    case ErrorKind::shape: return "shape";
    case ErrorKind::mode: return "mode";
    case ErrorKind::domain: return "domain";
    case ErrorKind::empty_series: return "empty-series";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::prenormalization_required: return "prenormalization-required";
    case ErrorKind::out_of_scope: return "out-of-scope";
    case ErrorKind::certification: return "certification-failed";
    case ErrorKind::invariance_violation: return "invariance-violation";
    case ErrorKind::range: return "range";
    case ErrorKind::parse: return "parse";
    case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

bool operator<(const LBound& a, const LBound& b) {
    if (a.kind != b.kind) return int(a.kind) < int(b.kind);
    return a.kind == LBound::Kind::finite && a.k < b.k;
}

LBound operator+(const LBound& a, const LBound& b) {
    if (a.is_inf() || b.is_inf()) return LBound::inf();
    if (a.kind == LBound::Kind::neg_inf || b.kind == LBound::Kind::neg_inf) return LBound::neg();
    return LBound::at(a.k + b.k);
}

namespace {

std::string lkey_str(const LKey& k, int depth) {
    std::string s = "[";
    for (int i = 0; i < depth; ++i) {
        if (i) s += ",";
        s += std::to_string(k.e[i]);
    }
    return s + "]";
}

} // namespace

std::string ExponentKey::str(int depth) const { return "(" + z.str() + "," + lkey_str(l, depth) + ")"; }

std::string Frontier::str(int depth) const {
    if (infinite) return "+inf";
    if (block_start) return "(" + z.str() + ",-inf)";
    return "(" + z.str() + "," + lkey_str(l, depth) + ")";
}

void TruncationGrid::validate() const {
    if (z_cap <= Q(0)) fail(ErrorKind::domain, "z_cap must be positive");
    if (block_cap < 1) fail(ErrorKind::domain, "block_cap must be positive");
    if (depth < 0) fail(ErrorKind::domain, "depth must be nonnegative");
    if (depth > kMaxDepth) fail(ErrorKind::depth_overflow, "depth exceeds the compiled maximum");
}

TruncationGrid combine(const TruncationGrid& a, const TruncationGrid& b) {
    TruncationGrid g;
    g.z_cap = std::min(a.z_cap, b.z_cap);
    g.block_cap = std::min(a.block_cap, b.block_cap);
    g.depth = std::max(a.depth, b.depth);
    if (g.depth > kMaxDepth) fail(ErrorKind::depth_overflow, "depth exceeds the compiled maximum");
    return g;
}

LBound Profile::get(const Q& z) const {
    if (zf && z >= *zf) return LBound::neg();
    auto it = at.find(z);
    return it == at.end() ? LBound::inf() : it->second;
}

void Profile::lower(const Q& z, const LBound& b) {
    if (b.is_inf()) return;
    if (b.kind == LBound::Kind::neg_inf) {
        lower_zf(z);
        return;
    }
    auto [it, fresh] = at.emplace(z, b);
    if (!fresh && b < it->second) it->second = b;
}

std::optional<Q> Profile::vz() const {
    std::optional<Q> v = zf;
    for (auto& [z, b] : at)
        if (!b.is_inf() && (!zf || z < *zf)) {
            if (!v || z < *v) v = z;
            break;
        }
    return v;
}

TransSeries TransSeries::monomial(const TruncationGrid& g, const Coeff& c, const ExponentKey& k) {
    TransSeries s(g, c.is_exact() ? Mode::exact : Mode::floating);
    if (k.l.used_depth() > g.depth) fail(ErrorKind::depth_overflow, "monomial needs a deeper logarithm than the grid allows");
    s.add_term(k, c);
    s.normalize();
    return s;
}

TransSeries TransSeries::ell(const TruncationGrid& g, int m, int power) {
    if (m < 1 || m > g.depth) fail(ErrorKind::depth_overflow, "l_" + std::to_string(m) + " exceeds depth");
    return monomial(g, Coeff(1), {Q(0), LKey::unit(m).times(power)});
}

void TransSeries::add_term(const ExponentKey& k, const Coeff& c) {
    if (c.is_zero()) return;
    auto& b = blocks_[k.z];
    auto [it, fresh] = b.terms.emplace(k.l, c);
    if (!fresh) it->second += c;
}

void TransSeries::set_term(const ExponentKey& k, const Coeff& c) {
    blocks_[k.z].terms[k.l] = c;
}

void TransSeries::lower_block_frontier(const Q& z, const LBound& b) {
    if (b.is_inf()) return;
    if (b.kind == LBound::Kind::neg_inf) {
        lower_zf(z);
        return;
    }
    auto& blk = blocks_[z];
    blk.frontier = min(blk.frontier, b);
}

void TransSeries::lower_zf(const Q& z) {
    if (!zf_ || z < *zf_) zf_ = z;
}

void TransSeries::lower_to(const Profile& p) {
    if (p.zf) lower_zf(*p.zf);
    for (auto& [z, b] : p.at) lower_block_frontier(z, b);
}

void TransSeries::normalize() {
    if (zf_ && *zf_ > grid_.z_cap) {
        // content past the cap is never stored, so it cannot count as known
        zf_ = grid_.z_cap;
    }
    for (auto it = blocks_.begin(); it != blocks_.end();) {
        const Q& z = it->first;
        ZBlock& b = it->second;
        if ((zf_ && z >= *zf_) || z >= grid_.z_cap) {
            bool content = !b.terms.empty() || b.frontier.finite();
            if (content && z >= grid_.z_cap) lower_zf(grid_.z_cap);
            it = blocks_.erase(it);
            continue;
        }
        if (b.frontier.finite()) b.terms.erase(b.terms.lower_bound(b.frontier.k), b.terms.end());
        std::size_t kept = 0;
        for (auto t = b.terms.begin(); t != b.terms.end();) {
            if (t->second.is_zero()) {
                t = b.terms.erase(t);
                continue;
            }
            if (mode_ == Mode::floating && t->second.is_exact()) t->second = t->second.to_float();
            if (++kept > std::size_t(grid_.block_cap)) {
                b.frontier = min(b.frontier, LBound::at(t->first));
                b.terms.erase(t, b.terms.end());
                break;
            }
            ++t;
        }
        if (b.terms.empty() && b.frontier.is_inf()) it = blocks_.erase(it);
        else ++it;
    }
    // a z-cut below the cap still hides everything above it
    if (zf_)
        for (auto it = blocks_.lower_bound(*zf_); it != blocks_.end();) it = blocks_.erase(it);
}

Coeff TransSeries::coeff(const ExponentKey& k) const {
    auto b = blocks_.find(k.z);
    if (b == blocks_.end()) return mode_ == Mode::exact ? Coeff() : Coeff::from_float(0);
    auto t = b->second.terms.find(k.l);
    if (t == b->second.terms.end()) return mode_ == Mode::exact ? Coeff() : Coeff::from_float(0);
    return t->second;
}

bool TransSeries::is_exact_at(const ExponentKey& k) const {
    if (zf_ && k.z >= *zf_) return false;
    if (k.z >= grid_.z_cap) return false;
    auto b = blocks_.find(k.z);
    if (b == blocks_.end()) return true;
    return b->second.frontier.above(k.l);
}

Frontier TransSeries::exact_frontier() const {
    Frontier f;
    for (auto& [z, b] : blocks_)
        if (b.frontier.finite()) {
            f.infinite = false;
            f.z = z;
            f.l = b.frontier.k;
            return f;
        }
    if (zf_) {
        f.infinite = false;
        f.z = *zf_;
        f.block_start = true;
    }
    return f;
}

std::size_t TransSeries::term_count() const {
    std::size_t n = 0;
    for (auto& [z, b] : blocks_) n += b.terms.size();
    return n;
}

std::vector<std::pair<ExponentKey, Coeff>> TransSeries::term_list() const {
    std::vector<std::pair<ExponentKey, Coeff>> v;
    for (auto& [z, b] : blocks_)
        for (auto& [l, c] : b.terms) v.push_back({{z, l}, c});
    return v;
}

Profile TransSeries::block_mins() const {
    Profile p;
    p.zf = zf_;
    for (auto& [z, b] : blocks_) {
        if (!b.terms.empty()) p.at[z] = LBound::at(b.terms.begin()->first);
        else p.at[z] = b.frontier;
    }
    return p;
}

Profile TransSeries::frontiers() const {
    Profile p;
    p.zf = zf_;
    for (auto& [z, b] : blocks_)
        if (b.frontier.finite()) p.at[z] = b.frontier;
    return p;
}

TransSeries TransSeries::to_float() const {
    TransSeries r = *this;
    r.mode_ = Mode::floating;
    for (auto& [z, b] : r.blocks_)
        for (auto& [l, c] : b.terms) c = c.to_float();
    return r;
}

TransSeries TransSeries::conj() const {
    TransSeries r = *this;
    for (auto& [z, b] : r.blocks_)
        for (auto& [l, c] : b.terms) c = c.conj();
    return r;
}

TransSeries TransSeries::with_grid(const TruncationGrid& g) const {
    TransSeries r = *this;
    r.grid_ = g;
    r.normalize();
    return r;
}

// ---------------------------------------------------------------- arithmetic

TransSeries add(const TransSeries& a, const TransSeries& b) {
    TransSeries out(combine(a.grid(), b.grid()),
                    a.mode() == Mode::exact && b.mode() == Mode::exact ? Mode::exact : Mode::floating);
    if (a.zf()) out.lower_zf(*a.zf());
    if (b.zf()) out.lower_zf(*b.zf());
    for (const TransSeries* s : {&a, &b})
        for (auto& [z, blk] : s->blocks()) {
            if (out.zf() && z >= *out.zf()) break;
            out.lower_block_frontier(z, blk.frontier);
            for (auto& [l, c] : blk.terms) out.add_term({z, l}, c);
        }
    out.normalize();
    return out;
}

TransSeries neg(const TransSeries& a) { return scale(a, Coeff(-1)); }

TransSeries sub(const TransSeries& a, const TransSeries& b) { return add(a, neg(b)); }

TransSeries scale(const TransSeries& a, const Coeff& c) {
    return shift(a, c, {Q(0), {}});
}

TransSeries shift(const TransSeries& a, const Coeff& c, const ExponentKey& k) {
    TransSeries out(a.grid(), a.mode() == Mode::exact && c.is_exact() ? Mode::exact : Mode::floating);
    if (c.is_zero()) return out;
    if (a.zf()) out.lower_zf(*a.zf() + k.z);
    for (auto& [z, blk] : a.blocks()) {
        Q nz = z + k.z;
        out.lower_block_frontier(nz, blk.frontier + k.l);
        for (auto& [l, v] : blk.terms) out.add_term({nz, l + k.l}, v * c);
    }
    for (auto& [z, blk] : out.blocks())
        for (auto& [l, v] : blk.terms)
            if (l.used_depth() > out.depth()) fail(ErrorKind::depth_overflow, "logarithm depth exceeded");
    out.normalize();
    return out;
}

TransSeries mul(const TransSeries& a, const TransSeries& b) {
    TransSeries out(combine(a.grid(), b.grid()),
                    a.mode() == Mode::exact && b.mode() == Mode::exact ? Mode::exact : Mode::floating);
    if (a.is_exact_zero() || b.is_exact_zero()) return out;
    Profile Ma = a.block_mins(), Mb = b.block_mins();
    auto va = Ma.vz(), vb = Mb.vz();
    if (a.zf() && vb) out.lower_zf(*a.zf() + *vb);
    if (b.zf() && va) out.lower_zf(*b.zf() + *va);
    const Q cap = out.grid().z_cap;
    for (auto& [z1, b1] : a.blocks())
        for (auto& [z2, b2] : b.blocks()) {
            Q z = z1 + z2;
            if (out.zf() && z >= *out.zf()) continue;
            if (z >= cap) continue;
            LBound m1 = Ma.get(z1), m2 = Mb.get(z2);
            out.lower_block_frontier(z, min(b1.frontier + m2, m1 + b2.frontier));
        }
    bool over_cap = false;
    for (auto& [z1, b1] : a.blocks())
        for (auto& [z2, b2] : b.blocks()) {
            Q z = z1 + z2;
            if (out.zf() && z >= *out.zf()) continue;
            if (z >= cap) {
                over_cap = true;
                continue;
            }
            LBound F = LBound::inf();
            if (auto it = out.blocks().find(z); it != out.blocks().end()) F = it->second.frontier;
            for (auto& [l1, c1] : b1.terms)
                for (auto& [l2, c2] : b2.terms) {
                    LKey l = l1 + l2;
                    if (!F.above(l)) break;
                    out.add_term({z, l}, c1 * c2);
                }
        }
    if (over_cap) out.lower_zf(cap);
    out.normalize();
    return out;
}

TransSeries pow_int(const TransSeries& a, int n) {
    if (n < 0) return pow_int(inv(a), -n);
    TransSeries r = TransSeries::constant(a.grid(), a.mode() == Mode::exact ? Coeff(1) : Coeff::from_float(1));
    TransSeries base = a;
    while (n) {
        if (n & 1) r = mul(r, base);
        n >>= 1;
        if (n) base = mul(base, base);
    }
    return r;
}

TransSeries d_dz(const TransSeries& f) {
    TransSeries out(f.grid(), f.mode());
    if (f.zf()) out.lower_zf(*f.zf() - Q(1));
    const int K = f.depth();
    for (auto& [z, blk] : f.blocks()) {
        Q nz = z - Q(1);
        out.lower_block_frontier(nz, blk.frontier);
        Coeff zc = Coeff(z.to_mpq());
        for (auto& [l, c] : blk.terms) {
            if (z.sign()) out.add_term({nz, l}, c * zc);
            LKey shiftk;
            for (int m = 1; m <= K; ++m) {
                shiftk = shiftk + LKey::unit(m);
                if (l.e[m - 1]) out.add_term({nz, l + shiftk}, c * Coeff(long(l.e[m - 1])));
            }
        }
    }
    out.normalize();
    return out;
}

// ---------------------------------------------------------------- orders

std::optional<ExponentKey> ord(const TransSeries& f) {
    Frontier fr = f.exact_frontier();
    for (auto& [z, b] : f.blocks()) {
        if (!b.terms.empty()) {
            ExponentKey k{z, b.terms.begin()->first};
            if (!fr.infinite) {
                if (k.z > fr.z) return std::nullopt;
                if (k.z == fr.z && (fr.block_start || !(k.l < fr.l))) return std::nullopt;
            }
            return k;
        }
        if (b.frontier.finite()) return std::nullopt;
    }
    return std::nullopt;
}

std::optional<Q> ord_z(const TransSeries& f) {
    for (auto& [z, b] : f.blocks())
        if (!b.terms.empty()) return z;
    return std::nullopt;
}

std::pair<ExponentKey, Coeff> leading_term(const TransSeries& f) {
    auto k = ord(f);
    if (!k) fail(ErrorKind::empty_series, "leading term of a zero (or unresolved) series");
    return {*k, f.coeff(*k)};
}

TransSeries leading_block(const TransSeries& f) {
    auto z = ord_z(f);
    if (!z) fail(ErrorKind::empty_series, "leading block of a zero series");
    TransSeries out(f.grid(), f.mode());
    const ZBlock& b = f.blocks().at(*z);
    for (auto& [l, c] : b.terms) out.add_term({*z, l}, c);
    out.lower_block_frontier(*z, b.frontier);
    out.normalize();
    return out;
}

std::vector<ExponentKey> supp(const TransSeries& f) {
    std::vector<ExponentKey> v;
    for (auto& [z, b] : f.blocks())
        for (auto& [l, c] : b.terms) v.push_back({z, l});
    return v;
}

std::vector<Q> supp_z(const TransSeries& f) {
    std::vector<Q> v;
    for (auto& [z, b] : f.blocks())
        if (!b.terms.empty()) v.push_back(z);
    return v;
}

TransSeries block_at(const TransSeries& f, const Q& q) {
    TransSeries out(f.grid(), f.mode());
    if (f.zf() && q >= *f.zf()) {
        out.lower_zf(Q(0));
        return out;
    }
    auto it = f.blocks().find(q);
    if (it == f.blocks().end()) return out;
    for (auto& [l, c] : it->second.terms) out.add_term({Q(0), l}, c);
    out.lower_block_frontier(Q(0), it->second.frontier);
    out.normalize();
    return out;
}

std::optional<std::int32_t> ord_ell(const TransSeries& f, int m) {
    std::optional<std::int32_t> best;
    for (auto& [z, b] : f.blocks())
        for (auto& [l, c] : b.terms)
            if (!best || l.e[m - 1] < *best) best = l.e[m - 1];
    return best;
}

Distance dist_z(const TransSeries& f, const TransSeries& g) {
    TransSeries d = sub(f, g);
    Distance out;
    auto o = ord_z(d);
    if (!o) {
        out.indistinguishable = true;
        return out;
    }
    out.order = *o;
    out.value = std::pow(2.0, -o->to_double());
    return out;
}

std::vector<Coeff> weak_delta(const std::vector<TransSeries>& seq, const ExponentKey& key) {
    std::vector<Coeff> v;
    v.reserve(seq.size());
    for (auto& s : seq) v.push_back(s.coeff(key));
    return v;
}

// ---------------------------------------------------------------- printing

std::string TransSeries::str() const {
    std::string s;
    for (auto& [z, b] : blocks_)
        for (auto& [l, c] : b.terms) {
            std::string mono;
            auto factor = [&](const std::string& f) {
                if (!mono.empty()) mono += "*";
                mono += f;
            };
            if (z != Q(0)) {
                if (z == Q(1)) factor("z");
                else if (z.is_integer()) factor("z^" + z.str());
                else factor("z^(" + z.str() + ")");
            }
            for (int m = 0; m < grid_.depth; ++m)
                if (l.e[m]) {
                    std::string f = "l" + std::to_string(m + 1);
                    if (l.e[m] != 1) f += "^" + std::to_string(l.e[m]);
                    factor(f);
                }
            std::string cs = c.str();
            bool negative = !cs.empty() && cs[0] == '-';
            if (negative) cs = cs.substr(1);
            std::string term;
            if (mono.empty()) term = cs;
            else if (cs == "1") term = mono;
            else term = cs + "*" + mono;
            if (s.empty()) s = negative ? "-" + term : term;
            else s += negative ? " - " + term : " + " + term;
        }
    return s.empty() ? "0" : s;
}

} // namespace lts
