#include "lts/normalize.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace lts {

namespace {

Coeff one_c(Mode m) { return m == Mode::exact ? Coeff(1) : Coeff::from_float(1); }

TransSeries id_like(const TransSeries& f) {
    TransSeries id = TransSeries::identity(f.grid());
    return f.mode() == Mode::floating ? id.to_float() : id;
}

TransSeries const_like(const TransSeries& f, const Coeff& c) {
    TransSeries r = TransSeries::constant(f.grid(), c);
    return f.mode() == Mode::floating ? r.to_float() : r;
}

// z^a (1 + B) for a pure block B
TransSeries lift(const TransSeries& B, const Q& a) {
    return shift(add(B, const_like(B, one_c(B.mode()))), one_c(B.mode()), {a, {}});
}

HyperbolicShape monic_shape(const TransSeries& f, const char* what) {
    HyperbolicShape sh = shape_of(f);
    if (!(sh.alpha > Q(1))) fail(ErrorKind::shape, std::string(what) + " needs alpha > 1; reduce the map first");
    bool monic = sh.lambda.is_exact() ? sh.lambda.is_one() : std::abs(sh.lambda.value() - 1.0) < 1e-14;
    if (!monic) fail(ErrorKind::shape, std::string(what) + " needs leading coefficient 1; reduce lambda first");
    return sh;
}

Q alpha_of(const TransSeries& f) { return shape_of(f).alpha; }

} // namespace

std::optional<Q> ord_z_bound(const TransSeries& f) { return f.block_mins().vz(); }

TransSeries bottcher_op(const TransSeries& f, const TransSeries& h) {
    HyperbolicShape sh = monic_shape(f, "the Boettcher operator");
    // z^q of the root needs h o f through z^(q + alpha - 1)
    TruncationGrid g = combine(f.grid(), h.grid());
    TruncationGrid wide = g;
    if (sh.alpha > Q(1)) wide.z_cap = g.z_cap + sh.alpha - Q(1);
    return pow_q(compose(h.with_grid(wide), f.with_grid(wide)), Q(1) / sh.alpha).with_grid(g);
}

TransSeries bottcher_sequence(const TransSeries& f, const TransSeries& h, int n) {
    if (n < 0) fail(ErrorKind::range, "iterate count must be nonnegative");
    TransSeries x = h;
    for (int i = 0; i < n; ++i) x = bottcher_op(f, x);
    return x;
}

NormalizationResult normalize_direct(const TransSeries& f) {
    HyperbolicShape sh = monic_shape(f, "normalize_direct");
    NormalizationResult r;
    r.alpha = sh.alpha;
    TransSeries id = id_like(f);
    r.phi1 = r.psi = id;
    TransSeries d = sub(f, TransSeries::z_pow(f.grid(), sh.alpha));
    if (d.is_exact_zero()) {
        r.phi = r.phi2 = id;
        r.beta = f.grid().z_cap;
        r.achieved_order = f.grid().z_cap;
        return r;
    }
    Q beta = *ord_z_bound(d) - sh.alpha + Q(1);
    if (!(beta > Q(1))) fail(ErrorKind::prenormalization_required, "the z^alpha block carries logarithms; prenormalize first");
    r.beta = beta;
    // agreement order with the fixed point: gamma -> 1 + alpha (gamma - 1)
    Q cert = beta;
    TransSeries h = id;
    const Q cap = f.grid().z_cap;
    while (cert < cap) {
        h = bottcher_op(f, h);
        ++r.iterations;
        cert = Q(1) + sh.alpha * (cert - Q(1));
    }
    h.lower_zf(cert);
    h.normalize();
    r.achieved_order = std::min(cert, cap);
    r.phi = r.phi2 = h;
    return r;
}

TransSeries prenorm_block(const TransSeries& f) {
    HyperbolicShape sh = monic_shape(f, "prenormalization");
    TransSeries B = block_at(f, sh.alpha);
    return sub(B, const_like(f, one_c(f.mode())));
}

namespace {

struct SigmaCache {
    std::vector<TransSeries> sigma;
    std::map<std::pair<int, int>, TransSeries> pw;
    const TransSeries& power(int m, int k) {
        auto key = std::pair{m, k};
        auto it = pw.find(key);
        if (it == pw.end()) it = pw.emplace(key, pow_int(sigma[m - 1], k)).first;
        return it->second;
    }
    TransSeries mono(const LKey& n, const TransSeries& unit) {
        TransSeries r = unit;
        for (int m = 1; m <= int(sigma.size()); ++m)
            if (n.e[m - 1]) r = mul(r, power(m, n.e[m - 1]));
        return r;
    }
};

} // namespace

TransSeries prenormalize(const TransSeries& f) {
    HyperbolicShape sh = monic_shape(f, "prenormalization");
    TransSeries R = prenorm_block(f);
    TransSeries id = id_like(f);
    if (R.is_exact_zero()) return id;
    auto o = ord(R);
    if (!o || !(LKey{} < o->l)) fail(ErrorKind::shape, "the z^alpha block must be 1 + (positive pure-log block)");

    const TruncationGrid outer = f.grid();
    TruncationGrid inner = outer;
    inner.block_cap = 2 * outer.block_cap + 4;
    const Mode mode = f.mode();
    const Coeff one = one_c(mode);
    TransSeries Rw = R.with_grid(inner);
    TransSeries F0 = lift(Rw, sh.alpha);
    const int K = outer.depth;

    SigmaCache sc;
    for (int m = 1; m <= K; ++m) sc.sigma.push_back(compose_ell(m, F0));
    const Coeff ia = Coeff(mpq_class(1) / sh.alpha.to_mpq());
    TransSeries unit = const_like(Rw, one);

    // A holds the not-yet-consumed right-hand side, keys above the last solved one
    TransSeries A = scale(log_series(add(unit, Rw)), ia);
    std::map<LKey, Coeff> W;
    LBound Wf = LBound::inf();
    for (;;) {
        auto bit = A.blocks().find(Q(0));
        if (A.zf() && *A.zf() <= Q(0)) {
            Wf = LBound::neg();
            break;
        }
        if (bit == A.blocks().end()) break;
        const ZBlock& blk = bit->second;
        if (blk.terms.empty()) {
            Wf = min(Wf, blk.frontier);
            break;
        }
        auto [n, an] = *blk.terms.begin();
        if (int(W.size()) >= outer.block_cap) {
            Wf = min(Wf, LBound::at(n));
            break;
        }
        if (n.e[0] < 0) fail(ErrorKind::internal, "prenormalization produced a key outside the positive block");
        mpq_class lam = 1;
        for (int i = 0; i < 1 + n.e[0]; ++i) lam /= sh.alpha.to_mpq();
        Coeff wn = an * Coeff(mpq_class(1) / (1 - lam));
        W[n] = wn;
        // consume key n and add (1/alpha) w_n (sigma^n - alpha^-n1 l^n)
        TransSeries corr = sc.mono(n, unit);
        corr = sub(corr, TransSeries::monomial(inner, Coeff(lam * sh.alpha.to_mpq()), {Q(0), n}));
        if (!corr.coeff({Q(0), n}).is_zero()) fail(ErrorKind::internal, "sigma power with an unexpected leading term");
        A = add(A, scale(corr, ia * wn));
        A.set_term({Q(0), n}, Coeff());
        A.normalize();
    }
    TransSeries Ws(inner, mode);
    for (auto& [n, c] : W) Ws.add_term({Q(0), n}, c);
    Ws.lower_block_frontier(Q(0), Wf);
    Ws.normalize();
    TransSeries E = exp_series(Ws).with_grid(outer);
    E.normalize();
    return shift(E, one, {Q(1), {}});
}

TransSeries op_R(const TransSeries& f, const TransSeries& T) {
    HyperbolicShape sh = monic_shape(f, "R_f");
    TransSeries F0 = lift(prenorm_block(f), sh.alpha);
    TransSeries h = lift(T, Q(1));
    return pow_q(compose(h, F0), Q(1) / sh.alpha);
}

namespace {

TransSeries S_at_power(const TransSeries& S, const Q& alpha) {
    if (S.is_exact_zero()) return S;
    return compose(S, TransSeries::z_pow(S.grid(), alpha));
}

TransSeries D1_series(const TransSeries& S) {
    if (S.is_exact_zero()) return S;
    Block b = Block::from_series(S, 1);
    return D_m(b, 1).to_series(S.grid());
}

} // namespace

TransSeries op_T(const TransSeries& f, const TransSeries& S) {
    HyperbolicShape sh = monic_shape(f, "T_f");
    TransSeries R = prenorm_block(f);
    TransSeries unit = const_like(f, one_c(f.mode()));
    TransSeries Sz = S_at_power(S, sh.alpha);
    return sub(mul(Sz, add(unit, R)), sub(pow_q(add(unit, S), sh.alpha), unit));
}

TransSeries op_K(const TransSeries& f, const TransSeries& S) {
    HyperbolicShape sh = monic_shape(f, "K_f");
    TransSeries R = prenorm_block(f);
    TransSeries unit = const_like(f, one_c(f.mode()));
    TransSeries Ss = S.is_exact_zero() ? S : compose(S, lift(R, sh.alpha));
    TransSeries Sz = S_at_power(S, sh.alpha);
    TransSeries DSz = S_at_power(D1_series(S), sh.alpha);
    return sub(mul(add(unit, R), sub(Ss, Sz)), mul(DSz, R));
}

TransSeries op_S(const TransSeries& f, const TransSeries& S) {
    HyperbolicShape sh = monic_shape(f, "S_f");
    TransSeries R = prenorm_block(f);
    TransSeries DSz = S_at_power(D1_series(S), sh.alpha);
    return sub(sub(neg(R), mul(DSz, R)), op_K(f, S));
}

ConvergenceMode convergence_mode(const TransSeries& f, const TransSeries& h) {
    ConvergenceMode m;
    NormalizationResult r = normalize(f, false);
    TransSeries a = leading_block(h), b = leading_block(r.phi);
    TransSeries d = sub(a, b);
    m.power_metric = ord_z(a) == ord_z(b) && d.is_zero();
    return m;
}

NormalizationResult normalize(const TransSeries& f, bool verify_result) {
    HyperbolicShape sh = shape_of(f);
    if (sh.cls == ShapeClass::parabolic) fail(ErrorKind::shape, "parabolic map: not strongly hyperbolic");
    if (sh.cls == ShapeClass::hyperbolic)
        fail(ErrorKind::out_of_scope, "hyperbolic map (alpha = 1, lambda != 1): use a Koenigs-type linearization instead");
    TransSeries g = f;
    bool inverted = false;
    if (sh.alpha < Q(1)) {
        g = reduce_alpha(f);
        inverted = true;
    }
    auto [psi, gr] = reduce_lambda(g);
    const Q alpha = alpha_of(gr);
    TransSeries phi1 = id_like(f);
    TransSeries f2 = gr;
    if (!prenorm_block(gr).is_exact_zero()) {
        phi1 = prenormalize(gr);
        f2 = conjugate(phi1, gr);
        // the z^alpha block of the conjugate is exactly 1 by construction of phi1
        ZBlock exact;
        exact.terms[LKey{}] = one_c(f.mode());
        f2.set_block(alpha, exact);
        f2.normalize();
    }
    NormalizationResult r = normalize_direct(f2);
    r.phi1 = phi1;
    r.psi = psi;
    r.inverted = inverted;
    r.alpha = sh.alpha;
    TransSeries phi = r.phi2;
    if (!sub(phi1, id_like(f)).is_exact_zero()) phi = compose(r.phi2, phi1);
    if (!shape_of(psi).lambda.is_one()) phi = compose(phi, psi);
    r.phi = phi;
    if (verify_result) r.report = verify_normalization(f, phi);
    return r;
}

// ---- semigroups ----

namespace {

struct Dfs {
    const std::vector<ExponentKey>& gens;  // z > 0 first (descending), then z == 0
    int depth;
    int window;
    std::set<std::tuple<std::size_t, Q, LKey>> dead;

    bool run(std::size_t i, const Q& zr, const LKey& need) {
        if (i == gens.size()) {
            if (zr != Q(0)) return false;
            for (int m = 0; m < depth; ++m)
                if (need.e[m] < 0) return false;
            return true;
        }
        auto key = std::tuple{i, zr, need};
        if (dead.count(key)) return false;
        const ExponentKey& g = gens[i];
        int maxc = g.z > Q(0) ? int(Q::floor_div(zr, g.z)) : window;
        LKey cur = need;
        for (int c = 0; c <= maxc; ++c) {
            if (run(i + 1, zr - g.z * Q(c), cur)) return true;
            cur = cur - g.l;
        }
        dead.insert(key);
        return false;
    }
};

std::vector<ExponentKey> dfs_order(std::vector<ExponentKey> gens) {
    std::erase_if(gens, [](const ExponentKey& g) {
        return g.z == Q(0) && std::all_of(g.l.e.begin(), g.l.e.end(), [](auto v) { return v >= 0; });
    });
    std::sort(gens.begin(), gens.end(), [](const ExponentKey& a, const ExponentKey& b) { return b < a; });
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    return gens;
}

} // namespace

bool SemigroupSpec::contains(const ExponentKey& k) const {
    if (k.z < Q(0)) return false;
    auto gens = dfs_order(generators);
    int w = l_window;
    for (auto v : k.l.e) w += std::abs(v);
    Dfs d{gens, depth, w, {}};
    return d.run(0, k.z, k.l);
}

std::vector<ExponentKey> SemigroupSpec::enumerate() const {
    auto gens = dfs_order(generators);
    std::set<ExponentKey> seen;
    std::priority_queue<ExponentKey, std::vector<ExponentKey>, std::greater<>> pq;
    auto norm1 = [](const LKey& l) {
        int s = 0;
        for (auto v : l.e) s += std::abs(v);
        return s;
    };
    pq.push({Q(0), {}});
    seen.insert({Q(0), {}});
    std::vector<ExponentKey> out;
    while (!pq.empty()) {
        ExponentKey k = pq.top();
        pq.pop();
        out.push_back(k);
        for (auto& g : gens) {
            ExponentKey n = k + g;
            if (n.z >= z_cutoff || norm1(n.l) > l_window || seen.count(n)) continue;
            seen.insert(n);
            pq.push(n);
        }
    }
    return out;
}

SemigroupSpec support_predict(const TransSeries& f) {
    HyperbolicShape sh = shape_of(f);
    if (!(sh.alpha > Q(1))) fail(ErrorKind::shape, "support prediction needs alpha > 1");
    SemigroupSpec s;
    s.depth = f.depth();
    s.z_cutoff = f.grid().z_cap;
    for (Q p = Q(1); p < s.z_cutoff; p = p * sh.alpha) s.generators.push_back({p, {}});
    TransSeries d = sub(f, TransSeries::z_pow(f.grid(), sh.alpha));
    for (auto& k : supp(d)) {
        Q base = k.z - sh.alpha;
        if (base == Q(0)) {
            s.generators.push_back({Q(0), k.l});
            continue;
        }
        for (Q z = base; z < s.z_cutoff; z = z * sh.alpha) s.generators.push_back({z, k.l});
    }
    return s;
}

SemigroupSpec support_of_composition_bound(const TransSeries& g, const TransSeries& f) {
    HyperbolicShape sh = shape_of(g);
    SemigroupSpec s;
    s.depth = std::max(f.depth(), g.depth());
    s.z_cutoff = combine(f.grid(), g.grid()).z_cap;
    for (auto& k : supp(f)) s.generators.push_back({sh.alpha * k.z, k.l});
    TransSeries g1 = sub(g, TransSeries::z_pow(g.grid(), sh.alpha));
    for (auto& k : supp(g1)) {
        ExponentKey e{k.z - sh.alpha, k.l};
        if (!(e.z == Q(0) && e.l.is_zero())) s.generators.push_back(e);
    }
    return s;
}

bool support_contained(const TransSeries& s, const SemigroupSpec& spec, std::vector<ExponentKey>* offending,
                       bool parallel) {
    auto keys = supp(s);
    std::vector<char> ok(keys.size(), 0);
    const long n = long(keys.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long i = 0; i < n; ++i) ok[i] = spec.contains(keys[i]);
    bool all = true;
    for (long i = 0; i < n; ++i)
        if (!ok[i]) {
            all = false;
            if (offending) offending->push_back(keys[i]);
        }
    return all;
}

bool order_bound_check(const TransSeries& f, const TransSeries& phi) {
    HyperbolicShape sh = shape_of(f);
    TransSeries d = sub(f, TransSeries::z_pow(f.grid(), sh.alpha));
    auto of = ord_z(d);
    if (!of) return true;
    Q bound = *of - sh.alpha + Q(1);
    auto op = ord_z(sub(phi, id_like(phi)));
    return !op || *op >= bound;
}

bool binomial_bound_check(const Q& alpha, int n, int i) {
    if (!(alpha > Q(1)) || n < 0 || i < 1) fail(ErrorKind::precondition, "binomial bound needs alpha > 1, n >= 0, i >= 1");
    mpq_class a = alpha.to_mpq(), x = 1;
    for (int k = 0; k < n; ++k) x /= a;
    mpq_class b = binom(x, i);
    return abs(b) <= x;
}

VerificationReport verify_normalization(const TransSeries& f, const TransSeries& phi, VerifyOptions opt) {
    VerificationReport rep;
    HyperbolicShape sh = shape_of(f);
    TransSeries c = conjugate(phi, f);
    rep.conjugate = c.str();
    auto terms = c.term_list();
    const ExponentKey lead{sh.alpha, {}};
    std::vector<char> good(terms.size(), 1);
    const long n = long(terms.size());
#pragma omp parallel for if (opt.parallel)
    for (long i = 0; i < n; ++i) {
        const auto& [k, v] = terms[i];
        if (k == lead) good[i] = v.is_exact() ? v.is_one() : std::abs(v.value() - 1.0) < 1e-9;
        else good[i] = v.is_exact() ? v.is_zero() : std::abs(v.value()) < 1e-9;
    }
    rep.conjugation_ok = c.is_exact_at(lead);
    for (long i = 0; i < n; ++i)
        if (!good[i]) {
            rep.conjugation_ok = false;
            rep.offending.push_back(terms[i].first);
        }
    rep.order_bound_ok = sh.alpha < Q(1) || !shape_of(f).lambda.is_one() || order_bound_check(f, phi);
    if (sh.alpha > Q(1) && sh.lambda.is_one()) {
        SemigroupSpec spec = support_predict(f);
        std::vector<ExponentKey> bad;
        rep.support_ok = support_contained(phi, spec, &bad, opt.parallel);
        rep.offending.insert(rep.offending.end(), bad.begin(), bad.end());
    } else {
        rep.support_ok = true;
    }
    return rep;
}

} // namespace lts
