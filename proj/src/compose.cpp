#include "lts/compose.hpp"

#include <set>

namespace lts {

const char* shape_name(ShapeClass c) {
    switch (c) {
    case ShapeClass::parabolic: return "parabolic";
    case ShapeClass::hyperbolic: return "hyperbolic";
    case ShapeClass::strongly_hyperbolic: return "strongly_hyperbolic";
    }
    return "?";
}

HyperbolicShape shape_of(const TransSeries& f) {
    auto o = ord(f);
    if (!o) fail(ErrorKind::shape, "series has no visible leading term");
    if (!o->l.is_zero()) fail(ErrorKind::shape, "leading term contains logarithms");
    if (o->z <= Q(0)) fail(ErrorKind::shape, "leading exponent must be positive");
    Coeff lam = f.coeff(*o);
    ShapeClass cls = ShapeClass::strongly_hyperbolic;
    if (o->z == Q(1)) cls = lam.is_one() || (!lam.is_exact() && lam.value() == std::complex<double>(1, 0))
                                ? ShapeClass::parabolic
                                : ShapeClass::hyperbolic;
    return {lam, o->z, cls};
}

TransSeries compose_power(const Q& beta, const TransSeries& f) {
    shape_of(f);
    return pow_q(f, beta);
}

TransSeries compose_log(const TransSeries& f) {
    shape_of(f);
    return log_series(f);
}

namespace {

TransSeries one_like(const TransSeries& x) {
    return TransSeries::constant(x.grid(), x.mode() == Mode::exact ? Coeff(1) : Coeff::from_float(1));
}

// x / leading_term(x) - 1
TransSeries relative_tail(const TransSeries& x) {
    auto [k, c] = leading_term(x);
    return sub(shift(x, c.inverse(), {-k.z, -k.l}), one_like(x));
}

TransSeries ell_of(const TransSeries& x) { return neg(inv(log_series(x))); }

std::vector<TransSeries> ell_chain(const TransSeries& f, int m) {
    std::vector<TransSeries> E;
    for (int i = 1; i <= m; ++i) E.push_back(ell_of(i == 1 ? f : E.back()));
    return E;
}

std::map<Q, LKey> envelope(const std::vector<std::pair<Q, LKey>>& items, const Q& limit) {
    std::map<Q, LKey> env;
    env[Q(0)] = LKey{};
    for (auto it = env.begin(); it != env.end(); ++it)
        for (auto& [dz, dl] : items) {
            Q z = it->first + dz;
            if (z >= limit) continue;
            LKey v = it->second + dl;
            auto [pos, fresh] = env.emplace(z, v);
            if (!fresh && v < pos->second) pos->second = v;
        }
    return env;
}

struct Plan {
    HyperbolicShape sh;
    TruncationGrid grid;
    Mode mode;
    std::vector<TransSeries> E;
    std::map<std::pair<int, int>, TransSeries> epow;
    std::vector<Q> zs;  // g-blocks that land below the cap
};

Plan make_plan(const TransSeries& g, const TransSeries& f) {
    Plan p{shape_of(f), combine(g.grid(), f.grid()),
           g.mode() == Mode::exact && f.mode() == Mode::exact ? Mode::exact : Mode::floating, {}, {}, {}};
    int need = 0;
    std::set<std::pair<int, int>> powers;
    for (auto& [z, blk] : g.blocks()) {
        if (p.sh.alpha * z >= p.grid.z_cap) continue;
        p.zs.push_back(z);
        for (auto& [l, c] : blk.terms)
            for (int m = 1; m <= kMaxDepth; ++m)
                if (l.e[m - 1]) {
                    need = std::max(need, m);
                    powers.insert({m, l.e[m - 1]});
                }
    }
    TransSeries fg = f.with_grid(p.grid);
    if (p.mode == Mode::floating) fg = fg.to_float();
    p.E = ell_chain(fg, need);
    for (auto [m, k] : powers) p.epow.emplace(std::pair{m, k}, pow_int(p.E[m - 1], k));
    return p;
}

TransSeries block_inner(const Plan& p, const ZBlock& blk) {
    TransSeries inner(p.grid, p.mode);
    for (auto& [l, c] : blk.terms) {
        TransSeries t = TransSeries::constant(p.grid, c);
        for (int m = 1; m <= kMaxDepth; ++m)
            if (l.e[m - 1]) t = mul(t, p.epow.at({m, l.e[m - 1]}));
        inner = add(inner, t);
    }
    return inner;
}

// what the lost and unknown parts of g can reach
Profile lost_profile(const Plan& p, const TransSeries& g, const TransSeries& f) {
    Profile out;
    if (g.zf()) out.lower_zf(p.sh.alpha * *g.zf());
    bool any = false;
    for (auto& z : p.zs)
        if (!g.blocks().at(z).frontier.is_inf()) any = true;
    if (!any) return out;

    std::vector<TransSeries> rel{relative_tail(f.with_grid(p.grid))};
    for (auto& e : p.E) rel.push_back(relative_tail(e));
    std::vector<std::pair<Q, LKey>> items;
    std::optional<Q> cut;
    Q base = p.sh.alpha * p.zs.front();
    for (auto& r : rel) {
        Profile M = r.block_mins();
        for (auto& [z, b] : M.at)
            if (z > Q(0) && b.finite()) items.push_back({z, b.k});
        if (M.zf && (!cut || *M.zf < *cut)) cut = M.zf;
    }
    auto env = envelope(items, p.grid.z_cap - base);
    for (auto& z : p.zs) {
        const LBound& F = g.blocks().at(z).frontier;
        if (F.is_inf()) continue;
        Q az = p.sh.alpha * z;
        for (auto& [dz, dl] : env)
            if (az + dz < p.grid.z_cap) out.lower(az + dz, F + dl);
        if (cut) out.lower_zf(az + *cut);
    }
    return out;
}

TransSeries finish(const Plan& p, const TransSeries& g, const TransSeries& f, std::vector<TransSeries>& parts) {
    TransSeries out(p.grid, p.mode);
    for (auto& t : parts) out = add(out, t);
    if (p.zs.size() < g.blocks().size()) out.lower_zf(p.grid.z_cap);
    out.lower_to(lost_profile(p, g, f));
    out.normalize();
    return out;
}

TransSeries power_of(const TransSeries& f, const Q& gamma, Mode mode) {
    if (gamma == Q(0)) return TransSeries::constant(f.grid(), mode == Mode::exact ? Coeff(1) : Coeff::from_float(1));
    return pow_q(f, gamma);
}

} // namespace

TransSeries compose_ell(int m, const TransSeries& f) {
    if (m < 1) fail(ErrorKind::domain, "l index starts at 1");
    if (m > f.depth()) fail(ErrorKind::depth_overflow, "l_" + std::to_string(m) + " exceeds depth");
    shape_of(f);
    return ell_chain(f, m).back();
}

TransSeries compose(const TransSeries& g, const TransSeries& f, ComposeOptions opt) {
    Plan p = make_plan(g, f);
    TransSeries fg = f.with_grid(p.grid);
    if (p.mode == Mode::floating) fg = fg.to_float();
    std::vector<TransSeries> parts(p.zs.size(), TransSeries(p.grid, p.mode));
    const long n = long(p.zs.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (opt.parallel && n > 1)
    for (long i = 0; i < n; ++i) {
        try {
            const ZBlock& blk = g.blocks().at(p.zs[i]);
            if (blk.terms.empty()) continue;
            parts[i] = mul(power_of(fg, p.zs[i], p.mode), block_inner(p, blk));
        } catch (...) {
#pragma omp critical
            err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return finish(p, g, f, parts);
}

TransSeries compose_serial(const TransSeries& g, const TransSeries& f) {
    Plan p = make_plan(g, f);
    TransSeries fg = f.with_grid(p.grid);
    if (p.mode == Mode::floating) fg = fg.to_float();
    std::vector<TransSeries> parts;
    std::map<Q, std::pair<Q, TransSeries>> chain;  // fractional part -> last power
    for (auto& z : p.zs) {
        const ZBlock& blk = g.blocks().at(z);
        if (blk.terms.empty()) continue;
        Q frac = z - Q(Q::floor_div(z, Q(1)));
        TransSeries P;
        auto it = chain.find(frac);
        if (it != chain.end() && z - it->second.first <= Q(3)) {
            P = it->second.second;
            for (Q k = it->second.first; k < z; k += Q(1)) P = mul(P, fg);
        } else {
            P = power_of(fg, z, p.mode);
        }
        chain[frac] = {z, P};
        parts.push_back(mul(P, block_inner(p, blk)));
    }
    return finish(p, g, f, parts);
}

namespace {

// certified loss of g from a residual r = f o g - z
Profile newton_loss(const TransSeries& r, const TransSeries& dinv) {
    Profile D = r.block_mins();
    Profile M = dinv.block_mins();
    Profile out;
    auto vD = D.vz(), vM = M.vz();
    if (D.zf && vM) out.lower_zf(*D.zf + *vM);
    if (M.zf && vD) out.lower_zf(*M.zf + *vD);
    for (auto& [z1, b1] : D.at)
        for (auto& [z2, b2] : M.at) out.lower(z1 + z2, b1 + b2);
    return out;
}

TransSeries invert_seed(const TransSeries& f, const HyperbolicShape& sh) {
    Q ia = Q(1) / sh.alpha;
    Coeff c = coeff_pow(sh.lambda, -ia, f.mode());
    TransSeries g = TransSeries::monomial(f.grid(), c, {ia, {}});
    return f.mode() == Mode::floating ? g.to_float() : g;
}

TransSeries residual(const TransSeries& f, const TransSeries& g) {
    TransSeries id = TransSeries::identity(f.grid());
    return sub(compose(f, g), f.mode() == Mode::floating ? id.to_float() : id);
}

// keep only the part of the correction below g's own cap
TransSeries certify(TransSeries g, const TransSeries& f, const TransSeries& r) {
    TransSeries dinv = inv(compose(d_dz(f), g));
    g.lower_to(newton_loss(r, dinv));
    g.normalize();
    return g;
}

} // namespace

TransSeries invert(const TransSeries& f) {
    HyperbolicShape sh = shape_of(f);
    TransSeries g = invert_seed(f, sh);
    TransSeries df = d_dz(f);
    TransSeries r = residual(f, g);
    for (int it = 0; it < 40 && !r.is_zero(); ++it) {
        TransSeries dinv = inv(compose(df, g));
        TransSeries next = sub(g, mul(r, dinv));
        TransSeries rn = residual(f, next);
        auto o_old = ord(r), o_new = ord(rn);
        if (o_old && o_new && !(*o_old < *o_new) && it > 2) break;
        g = next;
        r = rn;
    }
    return certify(g, f, r);
}

TransSeries invert_graded(const TransSeries& f) {
    HyperbolicShape sh = shape_of(f);
    TransSeries g = invert_seed(f, sh);
    // linearization at the seed: f'(g0) = lambda*alpha*g0^(alpha-1)
    TransSeries lin = inv(compose(d_dz(leading_block(f)), g));
    TransSeries r = residual(f, g);
    const int cap = 8 * (f.grid().block_cap + 4) * int(f.grid().z_cap.den() * f.grid().z_cap.num() + 1);
    for (int it = 0; it < cap && !r.is_zero(); ++it) {
        g = sub(g, mul(leading_block(r), lin));
        r = residual(f, g);
    }
    return certify(g, f, r);
}

TransSeries conjugate(const TransSeries& phi, const TransSeries& f) {
    shape_of(phi);
    shape_of(f);
    return compose(compose(phi, f), invert(phi));
}

std::pair<TransSeries, TransSeries> reduce_lambda(const TransSeries& f) {
    HyperbolicShape sh = shape_of(f);
    if (sh.alpha == Q(1)) fail(ErrorKind::shape, "reduce_lambda needs alpha != 1");
    Coeff c = coeff_pow(sh.lambda, Q(1) / (sh.alpha - Q(1)), f.mode());
    TransSeries psi = TransSeries::monomial(f.grid(), c, {Q(1), {}});
    TransSeries psi_inv = TransSeries::monomial(f.grid(), c.inverse(), {Q(1), {}});
    if (f.mode() == Mode::floating) {
        psi = psi.to_float();
        psi_inv = psi_inv.to_float();
    }
    if (c.is_one()) return {psi, f};
    TransSeries red = compose(compose(psi, f), psi_inv);
    // the leading coefficient is 1 by construction; pin it against rounding
    red.set_term({sh.alpha, {}}, f.mode() == Mode::floating ? Coeff::from_float(1) : Coeff(1));
    red.normalize();
    return {psi, red};
}

TransSeries reduce_alpha(const TransSeries& f) {
    HyperbolicShape sh = shape_of(f);
    if (!(sh.alpha < Q(1))) fail(ErrorKind::shape, "reduce_alpha needs 0 < alpha < 1");
    return invert(f);
}

} // namespace lts
