#include "lts/analytic.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lts/errors.hpp"
#include "lts/parallel.hpp"

namespace lts {

namespace {

double re_d(const cd& z) { return z.real(); }
double abs_d(const cd& z) { return std::abs(z); }
double re_d(const cx_hp& z) { return static_cast<double>(real(z)); }
double im_d(const cx_hp& z) { return static_cast<double>(imag(z)); }
double abs_d(const cx_hp& z) { return static_cast<double>(abs(z)); }
cd to_cd(const cd& z) { return z; }
cd to_cd(const cx_hp& z) { return {re_d(z), im_d(z)}; }

std::string zstr(cd z) {
    std::ostringstream os;
    os << std::setprecision(12) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

double numeric_derivative(const RFun& h, double x) {
    double step = 1e-6 * std::max(1.0, std::abs(x));
    return (h(x + step) - h(x - step)) / (2 * step);
}

// Orbit of z under f with the escape, domain and Cauchy assertions; returns f^N(z).
template <class C>
C checked_orbit(const std::function<C(C)>& f, const C& z, const AsymptoticSpec& s, const DomainSpec& dom, int N,
                double slack, const std::function<void(int, const C&)>& visit = nullptr) {
    const double x0 = re_d(z);
    const double r0 = rho_of(s, x0);
    const C a(s.alpha);
    C w = z;
    for (int n = 0; n < N; ++n) {
        if (visit) visit(n, w);
        C next = f(w);
        double mag = abs_d(w);
        C diff = next - a * w;
        double defect = abs_d(diff);
        double lim = M_of(s, x0 + n * r0);
        if (!(defect <= lim * (1 + 1e-9) + slack * mag))
            fail(ErrorKind::certification, "Cauchy bound broken at step " + std::to_string(n) + ", iterate " +
                                               zstr(to_cd(w)) + ": defect " + std::to_string(defect) +
                                               " > " + std::to_string(lim));
        w = next;
        double xr = re_d(w);
        if (!(xr >= x0 + (n + 1) * r0 - slack * abs_d(w) - 1e-12 * std::abs(x0)))
            fail(ErrorKind::invariance_violation, "monotone escape broken at step " + std::to_string(n + 1) +
                                                      ", iterate " + zstr(to_cd(w)) + " from " + zstr(to_cd(z)));
        if (!dom.contains_R(to_cd(w)))
            fail(ErrorKind::invariance_violation, "iterate left the domain at step " + std::to_string(n + 1) +
                                                      ": " + zstr(to_cd(w)) + " from " + zstr(to_cd(z)));
    }
    return w;
}

template <class C>
C alpha_power(double alpha, int N) {
    C p(1.0), a(alpha);
    for (int i = 0; i < N; ++i) p *= a;
    return p;
}

void require_in_domain(const DomainSpec& dom, cd z) {
    if (!dom.contains_R(z)) fail(ErrorKind::domain, "sample " + zstr(z) + " is outside D_R");
}

} // namespace

double exp_iter(int k, double x) {
    for (int i = 0; i < k; ++i) x = std::exp(x);
    return x;
}

double M_eps_k(double x, double eps, int k) {
    if (k < 0) fail(ErrorKind::domain, "k must be nonnegative");
    if (!(x > exp_iter(k, 0.0))) fail(ErrorKind::domain, "M_{eps,k} needs x > exp^k(0)");
    double v = x;
    for (int i = 0; i < k; ++i) v = std::log(v);
    return std::pow(v, -eps);
}

double rho(double x, double alpha, double eps, int k) { return (alpha - 1) * x - M_eps_k(x, eps, k); }

namespace {

MapCheckReport map_check(bool upper, const RFun& h, const RFun& dh, double d, double t, double interval,
                         const AsymptoticSpec& s, int samples) {
    if (samples < 2) samples = 2;
    MapCheckReport rep;
    rep.criterion_ok = rep.defining_ok = true;
    int last_bad = -1;
    std::string why;
    std::vector<double> xs(samples);
    for (int i = 0; i < samples; ++i) xs[i] = t + interval * i / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        double x = xs[i];
        bool crit = true, def = true;
        try {
            double hx = h(x);
            double der = dh ? dh(x) : numeric_derivative(h, x);
            double tol = 1e-9 * (1 + std::abs(der) + std::abs(hx / x));
            if (upper) {
                crit = der >= d + hx / x - tol;
                if (i + 1 < samples) crit = crit && h(xs[i + 1]) / xs[i + 1] >= hx / x - tol;
            } else {
                crit = der <= hx / x - d + tol;
                if (i + 1 < samples) crit = crit && h(xs[i + 1]) / xs[i + 1] <= hx / x + tol;
            }
            double r = rho_of(s, x);
            double m = M_of(s, x);
            if (r <= 0) {
                def = false;
            } else {
                double lhs = h(x + r) - hx;
                double dtol = 1e-12 * (std::abs(h(x + r)) + std::abs(hx));
                def = upper ? lhs >= (s.alpha - 1) * hx + m - dtol : lhs <= (s.alpha - 1) * hx - m + dtol;
            }
        } catch (const Error&) {
            crit = def = false;
        }
        if (!crit) rep.criterion_ok = false;
        if (!def) rep.defining_ok = false;
        if (!crit || !def) {
            last_bad = i;
            why = !crit ? "derivative criterion" : "defining inequality";
        }
    }
    if (last_bad < 0) {
        rep.ok = true;
        rep.t_prime = t;
        rep.witness = t;
        rep.detail = "both conditions hold on the grid";
    } else if (last_bad == samples - 1) {
        rep.ok = false;
        rep.witness = xs[last_bad];
        rep.t_prime = std::numeric_limits<double>::infinity();
        rep.detail = why + " fails at x = " + std::to_string(xs[last_bad]);
    } else {
        rep.ok = true;
        rep.witness = xs[last_bad];
        rep.t_prime = xs[last_bad + 1];
        rep.detail = why + " last fails at x = " + std::to_string(xs[last_bad]);
    }
    return rep;
}

} // namespace

MapCheckReport upper_map_check(const RFun& h, const RFun& dh, double d, double t, double interval,
                               const AsymptoticSpec& s, int samples) {
    return map_check(true, h, dh, d, t, interval, s, samples);
}

MapCheckReport lower_map_check(const RFun& h, const RFun& dh, double d, double t, double interval,
                               const AsymptoticSpec& s, int samples) {
    return map_check(false, h, dh, d, t, interval, s, samples);
}

cd sqd_boundary(double r, double C) {
    if (r < 0 || C <= 0) fail(ErrorKind::domain, "sqd_boundary needs r >= 0 and C > 0");
    double a = 0.5 * std::atan(r);
    double q = C * std::pow(r * r + 1, 0.25);
    return {q * std::cos(a), r + q * std::sin(a)};
}

double sqd_upper(double x, double C) {
    if (C <= 0) fail(ErrorKind::domain, "C must be positive");
    if (x < C) fail(ErrorKind::domain, "upper boundary is defined for x >= C");
    // x(r) = C sqrt((sqrt(1+r^2)+1)/2) is increasing; invert it in closed form
    double u = 2 * (x / C) * (x / C) - 1;
    double r = std::sqrt(std::max(0.0, u * u - 1));
    return sqd_boundary(r, C).imag();
}

MembershipResult sqd_membership(cd zeta, double C) {
    if (C <= 0) fail(ErrorKind::domain, "C must be positive");
    MembershipResult res;
    const double ftol = 1e-14 * (1 + std::abs(zeta));
    cd w = zeta - C * std::sqrt(zeta + 1.0);
    bool conv = false;
    for (int it = 0; it < 200; ++it) {
        res.iterations = it;
        cd sq = std::sqrt(w + 1.0);
        cd F = w + C * sq - zeta;
        if (std::abs(F) <= ftol) { conv = true; break; }
        if (std::abs(sq) < 1e-300) break;
        cd step = F / (1.0 + C / (2.0 * sq));
        // damp steps that would jump far
        double lim = 0.5 * (1 + std::abs(w));
        if (std::abs(step) > lim) step *= lim / std::abs(step);
        w -= step;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) break;
    }
    res.w = w;
    if (!conv) return res;
    if (std::abs(w.real()) <= 1e-11 * (1 + std::abs(w))) return res;
    res.status = w.real() > 0 ? Membership::member : Membership::not_member;
    return res;
}

const char* membership_name(Membership m) {
    switch (m) {
    case Membership::member: return "member";
    case Membership::not_member: return "not_member";
    default: return "indeterminate";
    }
}

DomainSpec DomainSpec::standard_quadratic(double C) {
    if (C <= 0) fail(ErrorKind::domain, "C must be positive");
    DomainSpec d;
    d.kind = Kind::standard_quadratic;
    d.C = C;
    return d;
}

DomainSpec DomainSpec::lower_upper(RFun h_l, RFun h_u, double t) {
    DomainSpec d;
    d.kind = Kind::lower_upper;
    d.h_l = std::move(h_l);
    d.h_u = std::move(h_u);
    d.t = t;
    return d;
}

bool DomainSpec::contains(cd z) const {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    if (kind == Kind::standard_quadratic) return sqd_membership(z, C).status == Membership::member;
    if (z.real() < t) return false;
    return h_l(z.real()) < z.imag() && z.imag() < h_u(z.real());
}

std::optional<std::pair<double, double>> DomainSpec::section(double x) const {
    if (kind == Kind::standard_quadratic) {
        if (x <= C) return std::nullopt;
        double h = sqd_upper(x, C);
        return std::make_pair(-h, h);
    }
    if (x < t) return std::nullopt;
    double lo = h_l(x), hi = h_u(x);
    if (!(lo < hi)) return std::nullopt;
    return std::make_pair(lo, hi);
}

std::string DomainSpec::describe() const {
    std::ostringstream os;
    if (kind == Kind::standard_quadratic)
        os << "standard quadratic C=" << C;
    else
        os << "lower/upper t=" << t;
    os << ", R=" << R;
    return os.str();
}

std::vector<cd> domain_samples(const DomainSpec& dom, double R, const GridSpec& g) {
    std::vector<cd> out;
    int nre = std::max(1, g.n_re);
    for (int i = 0; i < nre; ++i) {
        double x = nre == 1 ? R : R + g.span * i / (nre - 1);
        auto sec = dom.section(x);
        if (!sec) continue;
        double mid = 0.5 * (sec->first + sec->second);
        double half = 0.5 * (sec->second - sec->first) * (1 - g.margin);
        for (int j = -g.n_im; j <= g.n_im; ++j)
            out.emplace_back(x, g.n_im ? mid + half * j / g.n_im : mid);
    }
    return out;
}

namespace {

bool threshold_holds(const CMap& f, const AsymptoticSpec& s, const DomainSpec& dom, const GridSpec& g, double R) {
    if (R < s.R0 || R <= exp_iter(s.k, 0.0)) return false;
    if (rho_of(s, R) <= 0) return false;
    int nre = std::max(2, g.n_re);
    double prev = rho_of(s, R);
    for (int i = 1; i < 4 * nre; ++i) {
        double r = rho_of(s, R + g.span * i / (4 * nre - 1));
        if (!(r > prev)) return false;
        prev = r;
    }
    auto pts = domain_samples(dom, R, g);
    if (pts.empty()) return false;
    DomainSpec dr = dom;
    dr.R = R;
    for (cd z : pts) {
        if (!dr.contains_R(z)) return false;
        double x = z.real();
        double m = M_of(s, x);
        cd fz = f(z);
        if (!(std::abs(fz - s.alpha * z) <= m)) return false;
        if (!dr.contains_R(fz)) return false;
        double xl = x + rho_of(s, x), xh = s.alpha * x + m;
        double yl = s.alpha * z.imag() - m, yh = s.alpha * z.imag() + m;
        for (double xx : {xl, 0.5 * (xl + xh), xh})
            for (double yy : {yl, 0.5 * (yl + yh), yh})
                if (!dr.contains_R({xx, yy})) return false;
    }
    return true;
}

} // namespace

double invariant_threshold(const CMap& f, const AsymptoticSpec& s, const DomainSpec& dom, const GridSpec& g,
                           double R_ceiling) {
    if (s.alpha <= 1 || s.eps <= 0 || s.k < 0) fail(ErrorKind::precondition, "asymptotic spec needs alpha > 1, eps > 0");
    double base = std::max(s.R0, exp_iter(s.k, 0.0));
    double R = base + 1e-3 * (1 + std::abs(base));
    while (R <= R_ceiling) {
        if (threshold_holds(f, s, dom, g, R)) return R;
        R = R * 1.1 + 0.02;
    }
    fail(ErrorKind::certification, "no invariant R certified below " + std::to_string(R_ceiling));
}

double certified_tail(const AsymptoticSpec& s, double x0, int N, const RFun& bound) {
    const int L = 64;
    double r0 = rho_of(s, x0);
    double sum = 0;
    double w = std::pow(s.alpha, -(N + 1));
    for (int n = N; n < N + L; ++n) {
        sum += w * bound(x0 + n * r0);
        w /= s.alpha;
    }
    // bound is decreasing, so the rest is dominated by a geometric series
    sum += w * bound(x0 + (N + L) * r0) * s.alpha / (s.alpha - 1);
    return 2 * sum;
}

int tail_index(const AsymptoticSpec& s, double x0, double tol, const RFun& bound) {
    if (!(tol > 0)) fail(ErrorKind::precondition, "tolerance must be positive");
    for (int N = 0; N < 20000; ++N)
        if (certified_tail(s, x0, N, bound) < tol) return N;
    fail(ErrorKind::certification, "tail bound does not reach the tolerance");
}

KoenigsResult koenigs_normalize(const CMap& f, const AsymptoticSpec& s, const DomainSpec& dom, double R, double tol,
                                const CMapHP& f_hp, double tol_hp) {
    if (s.alpha <= 1) fail(ErrorKind::precondition, "alpha must exceed 1");
    if (rho_of(s, R) <= 0) fail(ErrorKind::precondition, "rho(R) must be positive");
    KoenigsResult res;
    res.domain = dom;
    res.domain.R = R;
    res.spec = s;
    res.map = f;
    res.tol = tol;
    DomainSpec d = res.domain;
    auto M = [s](double x) { return M_of(s, x); };
    res.iterations_used = [s, tol, d, M](cd z) {
        require_in_domain(d, z);
        return tail_index(s, z.real(), tol, M);
    };
    res.tail_bound = [s, tol, d, M](cd z) {
        require_in_domain(d, z);
        return certified_tail(s, z.real(), tail_index(s, z.real(), tol, M), M);
    };
    res.evaluator = [f, s, tol, d, M](cd z) {
        require_in_domain(d, z);
        int N = tail_index(s, z.real(), tol, M);
        cd w = checked_orbit<cd>(f, z, s, d, N, 64 * std::numeric_limits<double>::epsilon());
        return w / alpha_power<cd>(s.alpha, N);
    };
    if (f_hp) {
        res.evaluator_hp = [f_hp, s, tol_hp, d, M](cx_hp z) {
            require_in_domain(d, to_cd(z));
            int N = tail_index(s, re_d(z), tol_hp, M);
            cx_hp w = checked_orbit<cx_hp>(f_hp, z, s, d, N, 1e-90);
            return cx_hp(w / alpha_power<cx_hp>(s.alpha, N));
        };
    }
    return res;
}

std::vector<KoenigsSample> evaluate_grid(const KoenigsResult& k, const std::vector<cd>& pts, bool parallel) {
    std::vector<KoenigsSample> out(pts.size());
    const double eps = std::numeric_limits<double>::epsilon();
    guarded_for(static_cast<int>(pts.size()), parallel, [&](int i) {
        KoenigsSample& smp = out[i];
        cd z = pts[i];
        smp.zeta = z;
        smp.phi = k.evaluator(z);
        smp.N = k.iterations_used(z);
        smp.tail = k.tail_bound(z);
        cd fz = k.map(z);
        cd pf = k.evaluator(fz);
        smp.residual = std::abs(pf - k.spec.alpha * smp.phi);
        smp.residual_bound = k.tail_bound(fz) + k.spec.alpha * smp.tail +
                             64 * eps * (std::abs(pf) + k.spec.alpha * std::abs(smp.phi));
        double tb = M_of(k.spec, z.real()) / (1 - 1 / k.spec.alpha);
        smp.tangent_ok = std::abs(smp.phi - z) <= tb + smp.tail + 64 * eps * std::abs(z);
    });
    return out;
}

void write_samples_csv(std::ostream& os, const std::vector<KoenigsSample>& v) {
    os << "re_zeta,im_zeta,re_phi,im_phi,residual,bound\n";
    os << std::setprecision(17);
    for (const auto& s : v)
        os << s.zeta.real() << ',' << s.zeta.imag() << ',' << s.phi.real() << ',' << s.phi.imag() << ','
           << s.residual << ',' << s.residual_bound << '\n';
}

std::string samples_to_json(const std::vector<KoenigsSample>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : v)
        arr.push_back({{"zeta", {s.zeta.real(), s.zeta.imag()}},
                       {"phi", {s.phi.real(), s.phi.imag()}},
                       {"residual", s.residual},
                       {"bound", s.residual_bound},
                       {"tail", s.tail},
                       {"N", s.N},
                       {"tangent_ok", s.tangent_ok}});
    return arr.dump(2);
}

HomologicalSolution solve_homological(const CMap& f, const CMap& g, double nu, const AsymptoticSpec& s,
                                      const DomainSpec& dom, double R, double tol, const GridSpec& grid) {
    if (nu <= 0) fail(ErrorKind::precondition, "nu must be positive");
    if (rho_of(s, R) <= 0) fail(ErrorKind::precondition, "rho(R) must be positive");
    for (cd z : domain_samples(dom, R, grid)) {
        double lim = std::exp(-nu * z.real());
        if (std::abs(g(z)) > lim * (1 + 1e-12) + 1e-300)
            fail(ErrorKind::precondition, "|g| exceeds e^{-nu Re z} at " + zstr(z));
    }
    HomologicalSolution h;
    h.nu = nu;
    h.R = R;
    DomainSpec d = dom;
    d.R = R;
    auto B = [nu](double x) { return std::exp(-nu * x); };
    h.tail_bound = [s, tol, d, B](cd z) {
        require_in_domain(d, z);
        return certified_tail(s, z.real(), tail_index(s, z.real(), tol, B), B);
    };
    h.evaluator = [f, g, s, tol, d, B](cd z) {
        require_in_domain(d, z);
        int N = tail_index(s, z.real(), tol, B);
        cd sum = 0;
        double w = 1 / s.alpha;
        checked_orbit<cd>(f, z, s, d, N, 64 * std::numeric_limits<double>::epsilon(), [&](int, const cd& fn) {
            sum += w * g(fn);
            w /= s.alpha;
        });
        return -sum;
    };
    return h;
}

std::vector<HomologicalSample> check_homological(const HomologicalSolution& h, const CMap& f, const CMap& g,
                                                 double alpha, const std::vector<cd>& pts, bool parallel) {
    std::vector<HomologicalSample> out(pts.size());
    guarded_for(static_cast<int>(pts.size()), parallel, [&](int i) {
        cd z = pts[i];
        auto& o = out[i];
        o.zeta = z;
        o.value = h.evaluator(z);
        o.residual = std::abs(h.evaluator(f(z)) - alpha * o.value - g(z));
        o.scaled = std::abs(o.value) * std::exp(h.nu * z.real());
    });
    return out;
}

RealLineReport real_line_invariance_check(const KoenigsResult& k, const std::vector<double>& samples, double tol) {
    RealLineReport rep;
    rep.applicable = true;
    for (double x : samples) {
        cd z(x, 0);
        if (!k.domain.contains_R(z) || std::abs(k.map(z).imag()) > tol) {
            rep.applicable = false;
            return rep;
        }
    }
    rep.passed = true;
    for (double x : samples) {
        double im = std::abs(k.evaluator(cd(x, 0)).imag());
        rep.max_im = std::max(rep.max_im, im);
        if (im > tol) rep.passed = false;
    }
    return rep;
}

} // namespace lts
