#include "lts/series.hpp"

#include <cmath>

namespace lts {

namespace {

Coeff unit_coeff(Mode m) { return m == Mode::exact ? Coeff(1) : Coeff::from_float(1); }

TransSeries one_like(const TransSeries& x) { return TransSeries::constant(x.grid(), unit_coeff(x.mode())); }

// min over multisets of items (z > 0, l-bound) summing to each z below limit;
// the empty multiset gives 0 at z = 0
std::map<Q, LKey> multiset_envelope(const std::vector<std::pair<Q, LKey>>& items, const Q& limit) {
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

bool covered(const Profile& T, const TransSeries& S) {
    Q eff = S.grid().z_cap;
    if (S.zf() && *S.zf() < eff) eff = *S.zf();
    if (T.zf && *T.zf < eff) return false;
    for (auto& [z, b] : T.at) {
        if (z >= eff || b.is_inf()) continue;
        LBound F = LBound::inf();
        if (auto it = S.blocks().find(z); it != S.blocks().end()) F = it->second.frontier;
        if (!(F <= b)) return false;
    }
    return true;
}

} // namespace

TransSeries power_sum(const TransSeries& P, const TransSeries& u, const std::function<Coeff(int)>& c,
                      std::optional<int> last_nonzero, SumOptions opt) {
    const TruncationGrid grid = combine(P.grid(), u.grid());
    const Mode mode = P.mode() == Mode::exact && u.mode() == Mode::exact ? Mode::exact : Mode::floating;
    TransSeries S(grid, mode);
    if (P.is_exact_zero()) return S;

    Profile Mu = u.block_mins();
    if (Mu.zf && *Mu.zf <= Q(0)) fail(ErrorKind::internal, "power sum over a series unknown at order zero");
    auto vu = Mu.vz();
    if (vu && *vu < Q(0)) fail(ErrorKind::internal, "power sum over a series of negative z-order");
    bool has0 = false;
    LKey m0;
    if (auto it = Mu.at.find(Q(0)); it != Mu.at.end()) {
        has0 = true;
        if (!it->second.finite() || !(LKey{} < it->second.k))
            fail(ErrorKind::internal, "power sum over a series without positive order");
        m0 = it->second.k;
    }
    Profile MP = P.block_mins();
    auto vP = MP.vz();

    int max_terms = opt.max_terms;
    if (max_terms <= 0) {
        if (has0) max_terms = 8 + 4 * grid.block_cap;
        else if (vu) max_terms = 3 + int(Q::floor_div(grid.z_cap - (vP ? *vP : Q(0)), *vu));
        else max_terms = 1;
    }

    std::map<Q, LKey> env;
    if (has0) {
        std::vector<std::pair<Q, LKey>> items;
        Q limit = grid.z_cap - (vP ? *vP : Q(0));
        for (auto& [z, b] : Mu.at)
            if (z > Q(0) && b.finite() && z < limit) items.push_back({z, b.k - m0});
        env = multiset_envelope(items, limit);
    }
    auto tail = [&](int I) {
        Profile T;
        if (!vu) return T;  // u is exactly zero: no tail at all
        if (has0) {
            LKey shift = m0.times(I);
            for (auto& [zp, bp] : MP.at) {
                if (!bp.finite()) continue;
                for (auto& [ze, le] : env) {
                    Q z = zp + ze;
                    if (z >= grid.z_cap) continue;
                    T.lower(z, LBound::at(bp.k + shift + le));
                }
            }
            if (MP.zf) T.lower_zf(*MP.zf);
            if (Mu.zf && vP) T.lower_zf(*Mu.zf + *vP);
        } else if (vP) {
            T.lower_zf(*vP + *vu * Q(I));
        }
        return T;
    };

    TransSeries pw = one_like(u);
    for (int i = 0;; ++i) {
        Coeff ci = c(i);
        if (!ci.is_zero()) S = add(S, scale(mul(P, pw), ci));
        if (last_nonzero && i >= *last_nonzero) break;
        if (!vu) break;
        int I = i + 1;
        Profile T = tail(I);
        if (covered(T, S) || I >= max_terms) {
            S.lower_to(T);
            break;
        }
        pw = mul(pw, u);
    }
    S.normalize();
    return S;
}

mpq_class binom(const mpq_class& beta, int i) {
    mpq_class r = 1;
    for (int j = 0; j < i; ++j) r = r * (beta - j) / (j + 1);
    return r;
}

Coeff coeff_pow(const Coeff& c, const Q& beta, Mode mode) {
    if (beta.is_integer()) {
        std::int64_t n = beta.num();
        Coeff base = n < 0 ? c.inverse() : c;
        Coeff r = c.is_exact() ? Coeff(1) : Coeff::from_float(1);
        for (std::int64_t k = 0; k < (n < 0 ? -n : n); ++k) r = r * base;
        return r;
    }
    if (c.is_exact() && c.is_rational()) {
        mpq_class out;
        if (rational_root(c.rational(), long(beta.num()), long(beta.den()), out)) return Coeff(out);
    }
    if (mode == Mode::floating || !c.is_exact())
        return Coeff::from_float(std::pow(c.value(), beta.to_double()));
    fail(ErrorKind::mode, "coefficient " + c.str() + " raised to " + beta.str() +
                              " is not exactly representable; rerun in float mode");
}

Coeff coeff_log(const Coeff& c, Mode mode) {
    if (c.is_exact() && c.is_rational() && sgn(c.rational()) > 0) return Coeff::log_rational(c.rational());
    if (mode == Mode::floating || !c.is_exact()) return Coeff::from_float(std::log(c.value()));
    fail(ErrorKind::mode, "log of " + c.str() + " needs the principal branch; rerun in float mode");
}

namespace {

// x = c * mono(k) * (1 + u)
struct Factored {
    ExponentKey k;
    Coeff c;
    TransSeries u;
};

Factored factor(const TransSeries& x) {
    auto [k, c] = leading_term(x);
    Coeff ci = c.inverse();
    TransSeries u = sub(shift(x, ci, {-k.z, -k.l}), one_like(x));
    return {k, c, u};
}

} // namespace

TransSeries inv(const TransSeries& x) {
    Factored f = factor(x);
    Coeff ci = f.c.inverse();
    TransSeries P = TransSeries::monomial(x.grid(), ci, {-f.k.z, -f.k.l});
    if (x.mode() == Mode::floating) P = P.to_float();
    return power_sum(P, f.u, [](int i) { return Coeff(i % 2 ? -1L : 1L); });
}

TransSeries div(const TransSeries& a, const TransSeries& b) { return mul(a, inv(b)); }

TransSeries pow_q(const TransSeries& x, const Q& beta) {
    if (beta.is_integer() && beta.num() >= -64 && beta.num() <= 64) return pow_int(x, int(beta.num()));
    Factored f = factor(x);
    LKey lb;
    for (int m = 0; m < kMaxDepth; ++m) {
        Q e = Q(f.k.l.e[m]) * beta;
        if (!e.is_integer()) fail(ErrorKind::shape, "non-integer logarithm exponent in a power");
        lb.e[m] = std::int32_t(e.num());
    }
    Coeff cb = coeff_pow(f.c, beta, x.mode());
    TransSeries P = TransSeries::monomial(x.grid(), cb, {f.k.z * beta, lb});
    if (x.mode() == Mode::floating) P = P.to_float();
    mpq_class b = beta.to_mpq();
    mpq_class cur = 1;
    return power_sum(P, f.u, [b, cur](int i) mutable {
        if (i > 0) cur = cur * (b - (i - 1)) / i;
        return Coeff(cur);
    });
}

TransSeries log_series(const TransSeries& x) {
    Factored f = factor(x);
    const int K = x.depth();
    TransSeries out(x.grid(), x.mode());
    out.add_term({Q(0), {}}, coeff_log(f.c, x.mode()));
    if (f.k.z != Q(0)) out.add_term({Q(0), LKey::unit(1).times(-1)}, Coeff(-f.k.z.to_mpq()));
    for (int m = 1; m <= kMaxDepth; ++m) {
        std::int32_t n = f.k.l.e[m - 1];
        if (!n) continue;
        if (m + 1 > K) fail(ErrorKind::depth_overflow, "log of l_" + std::to_string(m) + " needs l_" + std::to_string(m + 1));
        out.add_term({Q(0), LKey::unit(m + 1).times(-1)}, Coeff(long(-n)));
    }
    out.normalize();
    TransSeries one = one_like(x);
    TransSeries tail = power_sum(one, f.u, [](int i) {
        if (i == 0) return Coeff();
        return Coeff(mpq_class(i % 2 ? 1 : -1, i));
    });
    return add(out, tail);
}

TransSeries exp_series(const TransSeries& w) {
    Coeff c0 = w.coeff({Q(0), {}});
    TransSeries rest = w;
    TransSeries P = one_like(w);
    if (!c0.is_zero()) {
        if (w.mode() == Mode::exact) fail(ErrorKind::mode, "exp of a nonzero constant is not exact");
        rest = sub(w, TransSeries::constant(w.grid(), c0));
        P = scale(P, Coeff::from_float(std::exp(c0.value())));
    }
    mpq_class cur = 1;
    return power_sum(P, rest, [cur](int i) mutable {
        if (i > 0) cur /= i;
        return Coeff(cur);
    });
}

} // namespace lts

namespace lts {

std::complex<double> evaluate(const TransSeries& f, std::complex<double> z) {
    std::array<std::complex<double>, kMaxDepth> ell{};
    std::complex<double> x = z;
    for (int m = 0; m < f.depth(); ++m) {
        ell[m] = -1.0 / std::log(x);
        x = ell[m];
    }
    std::complex<double> s = 0;
    for (auto& [k, c] : f.term_list()) {
        std::complex<double> t = c.value() * std::pow(z, k.z.to_double());
        for (int m = 0; m < f.depth(); ++m)
            if (k.l.e[m]) t *= std::pow(ell[m], double(k.l.e[m]));
        s += t;
    }
    return s;
}

} // namespace lts
