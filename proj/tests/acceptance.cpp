// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lts/analytic.hpp"
#include "lts/compose.hpp"
#include "lts/dulac.hpp"
#include "lts/errors.hpp"
#include "lts/normalize.hpp"
#include "lts/parse.hpp"

using namespace lts;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

TruncationGrid grid(Q z_cap, int block_cap, int depth) {
    TruncationGrid g;
    g.z_cap = z_cap;
    g.block_cap = block_cap;
    g.depth = depth;
    return g;
}

ExponentKey key(Q z, int l1 = 0) {
    ExponentKey k{z, {}};
    k.l.e[0] = l1;
    return k;
}

bool agree(const TransSeries& a, const TransSeries& b) { return sub(a, b).is_zero(); }

// ---------------------------------------------------------------- 1, 2

Outcome c1() {
    auto g = grid(Q(3), 6, 1);
    auto f = parse_series("z^2 + z^2*l1", g);
    auto a = op_R(f, TransSeries::zero(g));
    auto b = op_R(f, parse_series("l1", g));
    bool ok = a.coeff(key(Q(1))) == Coeff(1) && a.coeff(key(Q(1), 1)) == Coeff::rat(1, 2) &&
              a.coeff(key(Q(1), 2)) == Coeff::rat(-1, 8) && b.coeff(key(Q(1))) == Coeff(1) &&
              b.coeff(key(Q(1), 1)) == Coeff::rat(3, 4) && b.coeff(key(Q(1), 2)) == Coeff::rat(-1, 32);
    ok = ok && a.is_exact_at(key(Q(1), 2)) && b.is_exact_at(key(Q(1), 2));
    std::ostringstream os;
    os << "R(id) l1,l1^2 = " << a.coeff(key(Q(1), 1)).str() << ", " << a.coeff(key(Q(1), 2)).str()
       << "; R(id+z l1) = " << b.coeff(key(Q(1), 1)).str() << ", " << b.coeff(key(Q(1), 2)).str();
    return {ok, os.str()};
}

Outcome c2() {
    auto g = grid(Q(3), 8, 1);
    auto f = parse_series("z^2 + z^2*l1^3", g);
    auto a = block_at(op_R(f, parse_series("l1", g)), Q(1));
    auto b = block_at(op_R(f, TransSeries::zero(g)), Q(1));
    auto d = dist_m(Block::from_series(a), Block::from_series(b), 1);
    std::ostringstream os;
    os << "d = " << d.value;
    return {d.value == 0.5 && !d.indistinguishable, os.str()};
}

// ---------------------------------------------------------------- 3

Outcome c3() {
    std::mt19937 rng(20261015);
    const Q alphas[] = {Q(3, 2), Q(2), Q(3)};
    const Q betas[] = {Q(2), Q(5, 2), Q(3)};
    auto coeff = [&](void) {
        std::uniform_int_distribution<int> n(-5, 5), d(1, 4);
        int v = 0;
        while (v == 0) v = n(rng);
        return Coeff::rat(v, d(rng));
    };
    std::uniform_int_distribution<int> pick3(0, 2), lexp(-2, 2), nterms(1, 3);
    int fails = 0, equal_cases = 0, invisible = 0;
    std::string first_fail;
    for (int it = 0; it < 200; ++it) {
        Q alpha = alphas[pick3(rng)], beta = betas[pick3(rng)];
        // gamma = ord(h1 - h2); every third case sits on the equality line gamma = beta
        Q gamma = beta + Q(pick3(rng) * (it % 3 == 0 ? 0 : 1), 2);
        Q gain = (alpha - Q(1)) * (beta - Q(1));
        Q bound = gamma + gain;
        auto g = grid(Q(1) + std::max(alpha * gamma, alpha + beta + Q(2)), 12, 1);
        TransSeries f = TransSeries::z_pow(g, alpha);
        for (int j = 0, n = nterms(rng); j < n; ++j)
            f.add_term(key(alpha + beta - Q(1) + Q(pick3(rng), 2), lexp(rng)), coeff());
        f.normalize();
        TransSeries h1 = TransSeries::identity(g);
        for (int j = 0, n = nterms(rng); j < n; ++j) h1.add_term(key(beta + Q(pick3(rng), 2), lexp(rng)), coeff());
        h1.normalize();
        TransSeries diff = TransSeries::monomial(g, coeff(), key(gamma, lexp(rng)));
        for (int j = 0, n = pick3(rng); j < n; ++j) diff.add_term(key(gamma + Q(1 + pick3(rng), 2), lexp(rng)), coeff());
        diff.normalize();
        TransSeries h2 = add(h1, diff);
        Distance din = dist_z(h1, h2);
        Distance dout = dist_z(bottcher_op(f, h1), bottcher_op(f, h2));
        bool ok;
        if (dout.order) {
            ok = din.order && *din.order == gamma && *dout.order >= bound;
            if (ok && gamma == beta) {
                ok = *dout.order == bound;
                ++equal_cases;
            }
        } else {
            // equal on every retained key; the leading difference sits past a block frontier
            ++invisible;
            ok = dout.indistinguishable;
        }
        // the metric form of the same statement
        ok = ok && dout.value <= std::pow(2.0, -gain.to_double()) * din.value * (1 + 1e-12);
        if (!ok) {
            ++fails;
            if (first_fail.empty())
                first_fail = "alpha=" + alpha.str() + " beta=" + beta.str() + " f=" + f.str() + " h1=" + h1.str() +
                             " h2=" + h2.str();
        }
    }
    std::ostringstream os;
    os << "200 cases, " << fails << " violations, " << equal_cases << " equality cases, " << invisible
       << " unresolved at this truncation";
    if (!first_fail.empty()) os << "; first: " << first_fail;
    return {fails == 0 && equal_cases > 0 && invisible <= 10, os.str()};
}

// ---------------------------------------------------------------- 4

// phi = z + sum a_n z^n with phi(z^2 + z^3) = phi(z)^2, solved degree by degree over mpq
std::vector<mpq_class> bottcher_oracle(int D) {
    using Poly = std::vector<mpq_class>;
    auto mulp = [&](const Poly& a, const Poly& b) {
        Poly c(D + 2);
        for (int i = 0; i <= D + 1; ++i)
            if (sgn(a[i]))
                for (int j = 0; i + j <= D + 1; ++j) c[i + j] += a[i] * b[j];
        return c;
    };
    Poly f(D + 2), a(D + 2);
    f[2] = 1;
    f[3] = 1;
    a[1] = 1;
    for (int n = 2; n <= D; ++n) {
        // coefficient of z^(n+1): 2 a_n plus known terms on the right equals the left
        Poly lhs(D + 2), fp = f;
        for (int k = 1; k <= D; ++k) {
            for (int i = 0; i <= D + 1; ++i) lhs[i] += a[k] * fp[i];
            fp = mulp(fp, f);
        }
        Poly rhs = mulp(a, a);
        a[n] = (lhs[n + 1] - rhs[n + 1]) / 2;
    }
    a.resize(D + 1);
    return a;
}

Outcome c4() {
    const int D = 12;
    auto want = bottcher_oracle(D);
    auto g = grid(Q(D + 1), 4, 1);
    auto phi = normalize(parse_series("z^2+z^3", g), false).phi;
    int bad = 0;
    for (int n = 1; n <= D; ++n)
        if (!phi.is_exact_at(key(Q(n))) || !(phi.coeff(key(Q(n))) == Coeff(want[n]))) ++bad;
    bool first = want[2] == mpq_class(1, 2) && want[3] == mpq_class(1, 8);
    std::ostringstream os;
    os << "z^1..z^" << D << ": " << bad << " mismatches; a2 = " << want[2].get_str() << ", a3 = " << want[3].get_str()
       << ", a12 = " << want[12].get_str();
    return {bad == 0 && first, os.str()};
}

// ---------------------------------------------------------------- 5, 6, 7

struct SuiteCase {
    const char* f;
    int depth;
};
const SuiteCase kSuite[] = {
    {"z^2+z^3", 1}, {"z^2+z^2*l1", 1}, {"z^3+z^4*l1^2*l2^-1", 2}, {"z^2-z^3*log(z)", 1}};

Outcome c5() {
    int bad = 0;
    std::ostringstream os;
    for (auto& c : kSuite) {
        auto g = grid(Q(6), 6, c.depth);
        auto f = parse_series(c.f, g);
        auto r = normalize(f, false);
        shape_of(f);
        Q alpha = shape_of(f).alpha;
        auto conj = conjugate(r.phi, f);
        bool ok = agree(conj, TransSeries::z_pow(g, alpha)) && conj.coeff(key(alpha)) == Coeff(1);
        bad += !ok;
        os << c.f << (ok ? " ok" : " FAIL") << " (frontier " << conj.exact_frontier().str(c.depth) << "); ";
    }
    return {bad == 0, os.str()};
}

Outcome c6() {
    int bad = 0;
    std::ostringstream os;
    for (auto& c : kSuite) {
        auto g = grid(Q(6), 6, c.depth);
        auto f = parse_series(c.f, g);
        auto r = normalize(f, false);
        Q alpha = shape_of(f).alpha;
        auto need = *ord_z(sub(f, TransSeries::z_pow(g, alpha))) - alpha + Q(1);
        auto have = ord_z_bound(sub(r.phi, TransSeries::identity(g)));
        bool ok = order_bound_check(f, r.phi) && (!have || *have >= need);
        bad += !ok;
        os << c.f << ": " << (have ? have->str() : "inf") << " >= " << need.str() << "; ";
    }
    return {bad == 0, os.str()};
}

Outcome c7() {
    int bad = 0;
    std::ostringstream os;
    for (auto& c : kSuite) {
        auto g = grid(Q(12), c.depth == 1 ? 6 : 4, c.depth);
        auto f = parse_series(c.f, g);
        auto r = normalize(f, false);
        std::vector<ExponentKey> off;
        bool ok = support_contained(r.phi, support_predict(f), &off);
        bad += !ok;
        os << c.f << ": " << r.phi.term_count() << " terms" << (ok ? "" : " OUTSIDE") << "; ";
    }
    return {bad == 0, os.str()};
}

// ---------------------------------------------------------------- 8

Outcome c8() {
    std::ostringstream os;
    // seeded at phi1: every z-block stabilizes. f itself has no blocks past z^2, so
    // phi = phi1; the same run on f + z^3 shows the blocks settling one after another.
    bool blocks_ok = true;
    for (const char* fs : {"z^2+z^2*l1", "z^2+z^2*l1+z^3"}) {
    auto g = grid(Q(4), 6, 1);
    auto f = parse_series(fs, g);
    auto phi = normalize(f, false).phi;
    auto phi1 = prenormalize(f);
    const int steps = 8;
    std::vector<TransSeries> seq{phi1};
    for (int n = 1; n <= steps; ++n) seq.push_back(bottcher_op(f, seq.back()));
    os << fs << ": ";
    for (const Q& q : supp_z(phi)) {
        int settled = -1;
        for (int n = 0; n <= steps; ++n) {
            bool rest = true;
            for (int m = n; m <= steps; ++m) rest = rest && agree(block_at(seq[m], q), block_at(phi, q));
            if (rest) {
                settled = n;
                break;
            }
        }
        blocks_ok = blocks_ok && settled >= 0 && settled < steps;
        os << "z^" << q.str() << " settles at n=" << settled << "; ";
    }
    blocks_ok = blocks_ok && convergence_mode(f, phi1).power_metric;
    }

    // seeded at id: the z l1 coefficient converges in value only
    auto ge = grid(Q(3), 6, 1);
    auto fe = parse_series("z^2+z^2*l1", ge);
    TransSeries h = TransSeries::identity(ge);
    std::vector<mpq_class> exact{0};
    bool never_exact = true;
    for (int n = 1; n <= 16; ++n) {
        auto next = bottcher_op(fe, h);
        never_exact = never_exact && !agree(block_at(next, Q(1)), block_at(h, Q(1)));
        h = next;
        exact.push_back(h.coeff(key(Q(1), 1)).rational());
    }
    never_exact = never_exact && !convergence_mode(fe, TransSeries::identity(ge)).power_metric;
    auto ff = fe.to_float();
    TransSeries hf = TransSeries::identity(ge).to_float();
    std::vector<double> c{0};
    for (int n = 1; n <= 11; ++n) {
        hf = bottcher_op(ff, hf);
        c.push_back(hf.coeff(key(Q(1), 1)).value().real());
    }
    // least squares of log2 |Delta_n| against n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int n = 1; n + 1 < int(c.size()); ++n) {
        double d = std::abs(c[n + 1] - c[n]);
        if (d == 0) never_exact = false;
        double y = std::log2(d);
        sx += n;
        sy += y;
        sxx += double(n) * n;
        sxy += n * y;
        ++m;
    }
    double rate = -(m * sxy - sx * sy) / (m * sxx - sx * sx);  // |Delta_n| ~ 2^(-rate n)
    // the steps are exactly geometric in exact arithmetic
    bool ratio_exact = true;
    for (int n = 1; n + 2 < int(exact.size()); ++n)
        ratio_exact = ratio_exact && (exact[n + 2] - exact[n + 1]) * 4 == exact[n + 1] - exact[n];
    double limit_gap = std::abs(c.back() - 2.0 / 3.0);
    bool rate_ok = std::abs(rate - 2.0) < 1e-8 && rate >= 1.0;
    os << "id seed: fitted rate 2^-" << rate << "n (|rate-2| = " << std::abs(rate - 2.0) << "), exact ratio 1/4 "
       << (ratio_exact ? "holds" : "fails") << ", |c_11 - 2/3| = " << limit_gap;
    return {blocks_ok && never_exact && rate_ok && ratio_exact && limit_gap < 1e-5, os.str()};
}

// ---------------------------------------------------------------- 9

Outcome c9() {
    int checked = 0, bad = 0;
    for (int a : {2, 3})
        for (int n = 0; n <= 12; ++n) {
            mpq_class x = 1;
            for (int j = 0; j < n; ++j) x /= a;
            mpq_class b = 1;  // binom(x, i) built by the recurrence, independent of the library
            for (int i = 1; i <= 40; ++i) {
                b = b * (x - (i - 1)) / i;
                bool ok = abs(b) <= x && binomial_bound_check(Q(a), n, i) && b == binom(x, i);
                bad += !ok;
                ++checked;
            }
        }
    return {bad == 0, std::to_string(checked) + " (alpha, n, i) triples, " + std::to_string(bad) + " failures"};
}

// ---------------------------------------------------------------- 10

Outcome c10() {
    auto g = grid(Q(3), 8, 1);
    auto f = parse_series("z^2+z^2*l1", g);
    auto phi1 = prenormalize(f);
    auto ff = f.to_float();
    TransSeries T = TransSeries::zero(g, Mode::floating);
    for (int n = 0; n < 60; ++n)
        T = sub(block_at(op_R(ff, T), Q(1)), TransSeries::constant(g, Coeff::from_float(1.0)));
    double worst = 0;
    bool exact_ok = true;
    for (int j = 0; j <= 6; ++j) {
        exact_ok = exact_ok && phi1.is_exact_at(key(Q(1), j));
        double want = phi1.coeff(key(Q(1), j)).value().real();
        double have = j == 0 ? 1.0 + T.coeff(key(Q(0))).value().real() : T.coeff(key(Q(0), j)).value().real();
        worst = std::max(worst, std::abs(want - have));
    }
    std::ostringstream os;
    os << "max deviation over l1^0..l1^6 after 60 steps: " << worst;
    return {exact_ok && worst < 1e-8, os.str()};
}

// ---------------------------------------------------------------- 11, 12

const AsymptoticSpec kSpec{2, 1, 0, 0};
cd f_exp(cd z) { return 2.0 * z + std::exp(-z); }

Outcome c11() {
    auto dom = DomainSpec::standard_quadratic(1);
    double R = invariant_threshold(f_exp, kSpec, dom);
    auto k = koenigs_normalize(f_exp, kSpec, dom, R, 1e-13);
    auto pts = domain_samples(dom, R, {});
    double worst = 0, worst_tan = 0;
    int maxN = 0;
    bool ok = pts.size() == 100;
    for (auto& s : evaluate_grid(k, pts)) {
        worst = std::max(worst, s.residual);
        double m = 2 * M_of(kSpec, s.zeta.real());
        worst_tan = std::max(worst_tan, std::abs(s.phi - s.zeta) / m);
        maxN = std::max(maxN, s.N);
        ok = ok && s.residual < 1e-10 && std::abs(s.phi - s.zeta) <= m;
    }
    std::ostringstream os;
    os << "R = " << R << ", " << pts.size() << " samples, max residual " << worst << ", max |phi-z|/(2M) "
       << worst_tan << ", N <= " << maxN;
    return {ok, os.str()};
}

Outcome c12() {
    auto dom = DomainSpec::standard_quadratic(1);
    CMap f = [](cd z) { return 2.0 * z; };
    CMap g = [](cd z) { return std::exp(-z); };
    double R = invariant_threshold(f, kSpec, dom);
    auto h = solve_homological(f, g, 1, kSpec, dom, R, 1e-16);
    double worst = 0, scaled = 0;
    // wider grid for the boundedness claim
    for (auto& s : check_homological(h, f, g, 2, domain_samples(dom, R, {40, 40, 3}))) {
        worst = std::max(worst, s.residual);
        scaled = std::max(scaled, s.scaled);
    }
    std::ostringstream os;
    os << "R = " << R << ", max residual " << worst << ", sup |phi_g| e^Re z = " << scaled;
    return {worst < 1e-12 && scaled <= 1.0, os.str()};
}

// ---------------------------------------------------------------- 13, 14

DulacSeriesZ z2_exp(int n) {
    DulacSeriesZ d;
    d.alpha = Q(2);
    mpq_class fct = 1;
    for (int i = 1; i <= n; ++i) {
        fct /= i;
        d.ladder.push_back({Q(2 + i), {Coeff(i % 2 ? mpq_class(-fct) : fct)}});
    }
    d.cut = Q(3 + n);
    return d;
}

Outcome c13() {
    auto phi = dulac_normalize_formal(z2_exp(8), grid(Q(11), 8, 1));
    auto phi_hat = to_zeta_chart(phi, Q(8));
    auto dom = DomainSpec::standard_quadratic(1);
    double R = invariant_threshold(f_exp, kSpec, dom);
    CMapHP fh = [](cx_hp z) { return cx_hp(2 * z + exp(-z)); };
    auto k = koenigs_normalize(f_exp, kSpec, dom, R, 1e-13, fh);
    RaySpec ray;
    ray.x0 = R;
    ray.x1 = R + 20;
    ray.n = 41;
    ray.im = {0.0, 0.5};
    bool ok = phi_hat.ladder.size() >= 3;
    std::ostringstream os;
    for (int n = 1; n <= 3 && ok; ++n) {
        auto r = compare_formal_numeric(k, phi_hat, n, ray);
        ok = ok && r.bounded && r.decays;
        double mx = 0;
        for (double s : r.stat) mx = std::max(mx, s);
        os << "n=" << n << " (beta=" << phi_hat.ladder[n - 1].beta.str() << "): sup " << mx << ", eps_hat "
           << r.eps_hat << (r.decays ? "" : " NOT DECAYING") << "; ";
    }
    // negative control
    auto bad = phi_hat;
    for (auto& c : bad.ladder[0].poly) c = -c;
    bool control = !compare_formal_numeric(k, bad, 1, ray).decays;
    os << "flipped Q1 " << (control ? "rejected" : "ACCEPTED");
    return {ok && control, os.str()};
}

Outcome c14() {
    auto g = grid(Q(9), 8, 1);
    std::vector<DulacSeriesZ> inputs;
    DulacSeriesZ a;
    a.alpha = Q(2);
    a.ladder.push_back({Q(3), {Coeff(1)}});
    inputs.push_back(a);
    DulacSeriesZ b;
    b.alpha = Q(2);
    b.ladder.push_back({Q(3), {Coeff(0), Coeff(1)}});
    inputs.push_back(b);
    inputs.push_back(z2_exp(6));
    DulacSeriesZ c;
    c.alpha = Q(3);
    c.lambda = Coeff(4);
    c.ladder.push_back({Q(4), {Coeff::rat(1, 2), Coeff(0), Coeff(-2)}});
    c.ladder.push_back({Q(5), {Coeff(0), Coeff::rat(1, 3)}});
    inputs.push_back(c);
    DulacSeriesZ d;
    d.alpha = Q(3);
    d.ladder.push_back({Q(4), {Coeff(1), Coeff(1), Coeff(1)}});
    inputs.push_back(d);
    int bad = 0;
    for (auto& in : inputs) {
        auto out = dulac_normalize_formal(in, g);
        bool ok = is_dulac(to_transseries(out, g)) && out.is_real() && !out.ladder.empty();
        bad += !ok;
    }
    // complex input: closure still holds, realness is not claimed
    DulacSeriesZ z;
    z.alpha = Q(2);
    z.ladder.push_back({Q(3), {Coeff(0, 1), Coeff(1)}});
    auto zo = dulac_normalize_formal(z, g);
    bool closure_c = is_dulac(to_transseries(zo, g)) && !zo.is_real();
    std::ostringstream os;
    os << inputs.size() << " real inputs, " << bad << " failures; complex input closed " << (closure_c ? "yes" : "NO");
    return {bad == 0 && closure_c, os.str()};
}

} // namespace

int main() {
    struct Crit {
        int id;
        const char* name;
        double limit;  // seconds, 0 for none
        std::function<Outcome()> run;
    };
    std::vector<Crit> all = {
        {1, "prenormalization coefficients", 1, c1},
        {2, "non-contraction witness", 0, c2},
        {3, "contraction property suite", 30, c3},
        {4, "Bottcher oracle equivalence", 5, c4},
        {5, "normalization verification suite", 60, c5},
        {6, "order bound", 0, c6},
        {7, "support containment", 0, c7},
        {8, "convergence mode", 0, c8},
        {9, "binomial bound", 0, c9},
        {10, "prenormalization cross-check", 10, c10},
        {11, "Koenigs pipeline", 10, c11},
        {12, "homological solver", 5, c12},
        {13, "formal vs numeric asymptotics", 30, c13},
        {14, "Dulac closure", 0, c14},
    };
    int failed = 0;
    for (auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit > 0 && dt > c.limit) {
            o.pass = false;
            o.detail += " [over time limit]";
        }
        failed += !o.pass;
        std::printf("%s %2d %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, dt, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
