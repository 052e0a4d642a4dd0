#include "lts/dulac.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "lts/compose.hpp"
#include "lts/json_detail.hpp"
#include "lts/normalize.hpp"
#include "lts/parallel.hpp"
#include "lts/parse.hpp"

namespace lts {

using nlohmann::json;
using hp_real = boost::multiprecision::cpp_bin_float_100;

namespace {

constexpr int kBridgeBlockCap = 512;

void trim(std::vector<Coeff>& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

bool coeffs_real(const std::vector<Coeff>& v) {
    for (auto& c : v)
        if (!c.is_real()) return false;
    return true;
}

Coeff in_mode(const Coeff& c, Mode m) { return m == Mode::floating && c.is_exact() ? c.to_float() : c; }

// every key with l1 exponent <= 0 is known; unknown keys past an l1^(+n) frontier are not Dulac terms
bool block_complete(const TransSeries& f, const Q& z, const ZBlock& b) {
    if (b.frontier.kind == LBound::Kind::neg_inf) return false;
    if (b.frontier.finite() && b.frontier.k.e[0] <= 0) return false;
    return !f.zf() || z < *f.zf();
}

// blocks z^q P(l1^-1) of a depth-1 series, read as polynomials in (-log z)
std::vector<std::pair<Q, std::vector<Coeff>>> polynomial_blocks(const TransSeries& s, const Q& cap) {
    std::vector<std::pair<Q, std::vector<Coeff>>> out;
    for (auto& [z, b] : s.blocks()) {
        if (!(z < cap)) break;
        if (!block_complete(s, z, b)) break;
        std::vector<Coeff> p;
        for (auto& [k, c] : b.terms) {
            if (k.used_depth() > 1 || k.e[0] > 0) fail(ErrorKind::internal, "non-polynomial block in a Dulac conversion");
            std::size_t j = std::size_t(-k.e[0]);
            if (p.size() <= j) p.resize(j + 1);
            p[j] = c;
        }
        trim(p);
        if (!p.empty()) out.emplace_back(z, std::move(p));
    }
    // a gap before the cap is fine; a cut before the cap ends the ladder
    return out;
}

TruncationGrid bridge_grid(const Q& cap) {
    TruncationGrid g;
    g.z_cap = cap;
    g.block_cap = kBridgeBlockCap;
    g.depth = 1;
    return g;
}

hp_real mpq_hp(const mpq_class& q) {
    return hp_real(q.get_num().get_str()) / hp_real(q.get_den().get_str());
}

std::string poly_str(const std::vector<Coeff>& p, const char* var) {
    std::string s;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j].is_zero()) continue;
        std::string t = p[j].str();
        if (s.empty()) s = t;
        else s += t.rfind('-', 0) == 0 ? " - " + t.substr(1) : " + " + t;
        if (j > 0) s += std::string("*") + var + (j > 1 ? "^" + std::to_string(j) : "");
    }
    return s.empty() ? "0" : s;
}

Coeff parse_coeff_text(const std::string& text, Mode mode) {
    TruncationGrid g;
    g.depth = 1;
    TransSeries s = parse_series(text, g, mode);
    for (auto& [k, c] : s.term_list())
        if (!(k.z == Q(0)) || !k.l.is_zero()) fail(ErrorKind::parse, "coefficient expected, got '" + text + "'");
    return s.coeff({Q(0), {}});
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("invalid JSON: ") + e.what());
    }
}

} // namespace

void DulacSeriesZ::validate() const {
    if (lambda.is_zero()) fail(ErrorKind::domain, "lambda must be nonzero");
    if (!(Q(0) < alpha)) fail(ErrorKind::domain, "alpha must be positive");
    Q prev = alpha;
    for (auto& r : ladder) {
        if (!(prev < r.alpha)) fail(ErrorKind::domain, "ladder exponents must increase strictly above alpha");
        prev = r.alpha;
    }
}

bool DulacSeriesZ::is_real() const {
    if (!lambda.is_real()) return false;
    for (auto& r : ladder)
        if (!coeffs_real(r.P)) return false;
    return true;
}

void DulacSeriesZeta::validate() const {
    Q prev(0);
    for (auto& r : ladder) {
        if (!(prev < r.beta)) fail(ErrorKind::domain, "ladder exponents must increase strictly above 0");
        prev = r.beta;
    }
}

bool DulacSeriesZeta::is_real() const {
    if (!c0.is_real()) return false;
    for (auto& r : ladder)
        if (!coeffs_real(r.poly)) return false;
    return true;
}

std::optional<Q> DulacSeriesZeta::order_e() const {
    for (auto& r : ladder) {
        for (auto& c : r.poly)
            if (!c.is_zero()) return r.beta;
    }
    return std::nullopt;
}

DulacSeriesZeta to_zeta_chart(const DulacSeriesZ& d, const Q& cap_in) {
    d.validate();
    Q cap = cap_in;
    if (d.cut && *d.cut - d.alpha < cap) cap = *d.cut - d.alpha;
    Mode m = d.mode;
    if (!d.lambda.is_exact()) m = Mode::floating;
    DulacSeriesZeta out;
    out.alpha = d.alpha;
    out.mode = m;
    out.cut = cap;
    if (m == Mode::exact) {
        if (!d.lambda.is_rational() || sgn(d.lambda.rational()) <= 0)
            fail(ErrorKind::mode, "log lambda is not representable exactly; use float mode");
        out.c0 = -Coeff::log_rational(d.lambda.rational());
    } else {
        out.c0 = Coeff::from_float(-std::log(d.lambda.value()));
    }
    TruncationGrid g = bridge_grid(cap);
    TransSeries u(g, m);
    Coeff inv_l = m == Mode::exact ? d.lambda.inverse() : Coeff::from_float(1.0 / d.lambda.value());
    for (auto& r : d.ladder)
        for (std::size_t j = 0; j < r.P.size(); ++j)
            u.add_term({r.alpha - d.alpha, LKey::unit(1).times(-std::int64_t(j))}, in_mode(r.P[j] * inv_l, m));
    u.normalize();
    if (u.is_exact_zero()) return out;
    // -log(1+u) = sum_j (-1)^j u^j / j
    TransSeries one = TransSeries::constant(g, m == Mode::exact ? Coeff(1) : Coeff::from_float(1.0));
    TransSeries L = power_sum(one, u, [](int j) {
        if (j == 0) return Coeff();
        return Coeff(mpq_class(j % 2 ? -1 : 1, j));
    });
    for (auto& [b, p] : polynomial_blocks(L, cap)) out.ladder.push_back({b, p});
    return out;
}

DulacSeriesZ to_z_chart(const DulacSeriesZeta& d, const Q& cap_in) {
    d.validate();
    Q cap = cap_in;
    if (d.cut && *d.cut < cap) cap = *d.cut;
    Mode m = d.mode;
    if (!d.c0.is_exact()) m = Mode::floating;
    DulacSeriesZ out;
    out.alpha = d.alpha;
    out.mode = m;
    out.cut = cap + d.alpha;
    if (m == Mode::exact) {
        // lambda = exp(-c0) is rational exactly when c0 is an integer combination of log p
        mpq_class lam = 1;
        for (auto& t : d.c0.terms()) {
            if (t.mono.size() != 1 || t.mono[0].second != 1 || !t.c.is_real() || t.c.re.get_den() != 1)
                fail(ErrorKind::mode, "exp(-c0) is not representable exactly; use float mode");
            long n = t.c.re.get_num().get_si();
            mpz_class p = t.mono[0].first, pw;
            mpz_pow_ui(pw.get_mpz_t(), p.get_mpz_t(), std::abs(n));
            lam *= n > 0 ? mpq_class(1, pw) : mpq_class(pw, 1);
            lam.canonicalize();
        }
        out.lambda = Coeff(lam);
    } else {
        out.lambda = Coeff::from_float(std::exp(-d.c0.value()));
    }
    TruncationGrid g = bridge_grid(cap);
    TransSeries v(g, m);
    for (auto& r : d.ladder)
        for (std::size_t j = 0; j < r.poly.size(); ++j)
            v.add_term({r.beta, LKey::unit(1).times(-std::int64_t(j))}, in_mode(r.poly[j], m));
    v.normalize();
    if (v.is_exact_zero()) return out;
    TransSeries one = TransSeries::constant(g, m == Mode::exact ? Coeff(1) : Coeff::from_float(1.0));
    TransSeries e = sub(exp_series(neg(v)), one);
    for (auto& [b, p] : polynomial_blocks(e, cap)) {
        for (auto& c : p) c = c * out.lambda;
        out.ladder.push_back({b + d.alpha, p});
    }
    return out;
}

bool is_dulac(const TransSeries& f) {
    if (f.blocks().empty()) return false;
    for (auto& [k, c] : f.term_list())
        if (k.l.used_depth() > 1 || k.l.e[0] > 0) return false;
    const ZBlock& lead = f.blocks().begin()->second;
    return lead.terms.size() == 1 && lead.terms.begin()->first.is_zero();
}

TransSeries to_transseries(const DulacSeriesZ& d, const TruncationGrid& g) {
    d.validate();
    TruncationGrid gg = g;
    gg.depth = std::max(1, g.depth);
    Mode m = d.mode;
    TransSeries s(gg, m);
    s.add_term({d.alpha, {}}, in_mode(d.lambda, m));
    for (auto& r : d.ladder)
        for (std::size_t j = 0; j < r.P.size(); ++j)
            s.add_term({r.alpha, LKey::unit(1).times(-std::int64_t(j))}, in_mode(r.P[j], m));
    s.normalize();
    return s;
}

DulacSeriesZ from_transseries(const TransSeries& f) {
    if (!is_dulac(f)) fail(ErrorKind::shape, "not a Dulac series: " + f.str());
    DulacSeriesZ d;
    d.mode = f.mode();
    auto it = f.blocks().begin();
    d.alpha = it->first;
    d.lambda = it->second.terms.begin()->second;
    Q cap = f.zf() ? *f.zf() : f.grid().z_cap;
    for (auto& [z, b] : f.blocks())
        if (!block_complete(f, z, b)) {
            if (z < cap) cap = z;
            break;
        }
    d.cut = cap;
    bool first = true;
    for (auto& [z, p] : polynomial_blocks(f, cap)) {
        if (first) { first = false; continue; }  // the leading block
        d.ladder.push_back({z, p});
    }
    return d;
}

DulacSeriesZ dulac_normalize_formal(const DulacSeriesZ& d, const TruncationGrid& g) {
    d.validate();
    if (!(Q(1) < d.alpha)) fail(ErrorKind::shape, "Dulac normalization needs alpha > 1");
    TransSeries f = to_transseries(d, g);
    NormalizationResult r = normalize(f, false);
    if (!is_dulac(r.phi))
        fail(ErrorKind::internal, "normalization of a Dulac series left the Dulac class: " + r.phi.str());
    DulacSeriesZ out = from_transseries(r.phi);
    if (d.is_real() && !out.is_real())
        fail(ErrorKind::internal, "real Dulac input produced a non-real normalization");
    return out;
}

DulacSeriesZeta partial_normalizations(const DulacSeriesZeta& phi, int n) {
    if (n < 0 || std::size_t(n) > phi.ladder.size())
        fail(ErrorKind::range, "partial normalization order " + std::to_string(n) + " exceeds the ladder length " +
                                   std::to_string(phi.ladder.size()));
    DulacSeriesZeta out = phi;
    out.ladder.resize(n);
    return out;
}

cd evaluate(const DulacSeriesZeta& d, cd zeta) {
    cd s = d.alpha.to_double() * zeta + d.c0.value();
    for (auto& r : d.ladder) {
        cd p = 0;
        for (std::size_t j = r.poly.size(); j-- > 0;) p = p * zeta + r.poly[j].value();
        s += std::exp(-r.beta.to_double() * zeta) * p;
    }
    return s;
}

cx_hp coeff_hp(const Coeff& c) {
    if (!c.is_exact()) return cx_hp(c.value().real(), c.value().imag());
    cx_hp s(0);
    for (auto& t : c.terms()) {
        hp_real f = 1;
        for (auto& [p, e] : t.mono)
            for (int i = 0; i < e; ++i) f *= log(hp_real(p));
        s += cx_hp(mpq_hp(t.c.re) * f, mpq_hp(t.c.im) * f);
    }
    return s;
}

cx_hp evaluate_hp(const DulacSeriesZeta& d, const cx_hp& zeta) {
    cx_hp s = cx_hp(mpq_hp(d.alpha.to_mpq())) * zeta + coeff_hp(d.c0);
    for (auto& r : d.ladder) {
        cx_hp p(0);
        for (std::size_t j = r.poly.size(); j-- > 0;) p = p * zeta + coeff_hp(r.poly[j]);
        s += exp(-cx_hp(mpq_hp(r.beta.to_mpq())) * zeta) * p;
    }
    return s;
}

namespace {

bool same_poly(std::vector<Coeff> a, std::vector<Coeff> b) {
    trim(a);
    trim(b);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

} // namespace

bool operator==(const DulacSeriesZ& a, const DulacSeriesZ& b) {
    if (!(a.lambda == b.lambda) || !(a.alpha == b.alpha) || a.ladder.size() != b.ladder.size()) return false;
    for (std::size_t i = 0; i < a.ladder.size(); ++i)
        if (!(a.ladder[i].alpha == b.ladder[i].alpha) || !same_poly(a.ladder[i].P, b.ladder[i].P)) return false;
    return true;
}

bool operator==(const DulacSeriesZeta& a, const DulacSeriesZeta& b) {
    if (!(a.c0 == b.c0) || !(a.alpha == b.alpha) || a.ladder.size() != b.ladder.size()) return false;
    for (std::size_t i = 0; i < a.ladder.size(); ++i)
        if (!(a.ladder[i].beta == b.ladder[i].beta) || !same_poly(a.ladder[i].poly, b.ladder[i].poly)) return false;
    return true;
}

namespace {

std::string plus_term(const std::string& t) { return t.rfind('-', 0) == 0 ? " - " + t.substr(1) : " + " + t; }

} // namespace

std::string str(const DulacSeriesZ& d) {
    std::string s = d.lambda.str() + "*z^" + d.alpha.str();
    for (auto& r : d.ladder) s += " + z^" + r.alpha.str() + "*(" + poly_str(r.P, "L") + ")";
    return s + "   [L = -log z]";
}

std::string str(const DulacSeriesZeta& d) {
    std::string s = d.alpha.str() + "*zeta";
    if (!d.c0.is_zero()) s += plus_term(d.c0.str());
    for (auto& r : d.ladder) s += " + exp(-" + r.beta.str() + "*zeta)*(" + poly_str(r.poly, "zeta") + ")";
    return s;
}

DecayReport assess_decay(std::vector<double> x, std::vector<double> stat, DecayCriteria c) {
    DecayReport r;
    r.x = std::move(x);
    r.stat = std::move(stat);
    const std::size_t n = r.stat.size();
    r.bounded = n > 0;
    bool all_zero = true;
    for (double v : r.stat) {
        if (!std::isfinite(v)) r.bounded = false;
        if (v != 0) all_zero = false;
    }
    if (!r.bounded) {
        r.detail = "statistic is not finite on the grid";
        return r;
    }
    if (all_zero) {
        r.identically_zero = r.decays = true;
        r.eps_hat = std::numeric_limits<double>::infinity();
        r.detail = "statistic vanishes identically";
        return r;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (r.stat[i] <= 0) continue;
        double y = std::log(r.stat[i]);
        sx += r.x[i]; sy += y; sxx += r.x[i] * r.x[i]; sxy += r.x[i] * y;
        ++m;
    }
    if (m >= 2 && m * sxx - sx * sx > 0) r.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    r.eps_hat = -r.slope;
    std::size_t dec = std::max<std::size_t>(1, n / 10);
    double first = 0, last = 0;
    for (std::size_t i = 0; i < dec; ++i) {
        first += r.stat[i];
        last += r.stat[n - dec + i];
    }
    r.decays = last < c.ratio * first && r.slope < 0;
    std::ostringstream os;
    os << std::setprecision(4) << "first-tenth mean " << first / dec << ", last-tenth mean " << last / dec
       << ", slope " << r.slope;
    r.detail = os.str();
    return r;
}

namespace {

std::vector<double> ray_xs(const RaySpec& g) {
    std::vector<double> xs(std::max(1, g.n));
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = xs.size() == 1 ? g.x0 : g.x0 + (g.x1 - g.x0) * double(i) / double(xs.size() - 1);
    return xs;
}

} // namespace

DecayReport defect_decay_check(const CMap& f, double alpha, const DulacSeriesZeta& phi_n, const Q& beta_n,
                               const RaySpec& grid, const CMapHP& f_hp, DecayCriteria c, bool parallel) {
    auto xs = ray_xs(grid);
    std::vector<double> st(xs.size(), 0);
    const double b = beta_n.to_double();
    guarded_for(static_cast<int>(xs.size()), parallel, [&](int i) {
        double best = 0;
        for (double im : grid.im) {
            double v;
            if (f_hp) {
                cx_hp z(xs[i], im);
                cx_hp d = evaluate_hp(phi_n, f_hp(z)) - cx_hp(alpha) * evaluate_hp(phi_n, z);
                v = static_cast<double>(abs(d) * exp(hp_real(b) * hp_real(xs[i])));
            } else {
                cd z(xs[i], im);
                v = std::abs(evaluate(phi_n, f(z)) - alpha * evaluate(phi_n, z)) * std::exp(b * xs[i]);
            }
            best = std::max(best, v);
        }
        st[i] = best;
    });
    return assess_decay(xs, st, c);
}

DecayReport compare_formal_numeric(const KoenigsResult& phi, const DulacSeriesZeta& phi_hat, int n,
                                   const RaySpec& ray, DecayCriteria c, bool parallel) {
    DulacSeriesZeta pn = partial_normalizations(phi_hat, n);
    const double b = n == 0 ? 0.0 : phi_hat.ladder[n - 1].beta.to_double();
    auto xs = ray_xs(ray);
    std::vector<double> st(xs.size(), 0);
    guarded_for(static_cast<int>(xs.size()), parallel, [&](int i) {
        double best = 0;
        for (double im : ray.im) {
            double v;
            if (phi.evaluator_hp) {
                cx_hp z(xs[i], im);
                cx_hp d = phi.evaluator_hp(z) - evaluate_hp(pn, z);
                v = static_cast<double>(abs(d) * exp(hp_real(b) * hp_real(xs[i])));
            } else {
                cd z(xs[i], im);
                v = std::abs(phi.evaluator(z) - evaluate(pn, z)) * std::exp(b * xs[i]);
            }
            best = std::max(best, v);
        }
        st[i] = best;
    });
    return assess_decay(xs, st, c);
}

void write_decay_csv(std::ostream& os, const DecayReport& r) {
    os << "re_zeta,statistic\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.x.size(); ++i) os << r.x[i] << ',' << r.stat[i] << '\n';
}

std::string to_json(const DulacSeriesZeta& d) {
    json j;
    j["alpha"] = d.alpha.str();
    j["c0"] = detail::coeff_json(d.c0);
    j["mode"] = d.mode == Mode::exact ? "exact" : "float";
    json lad = json::array();
    for (auto& r : d.ladder) {
        json q = json::array();
        for (auto& c : r.poly) q.push_back(c.str());
        lad.push_back({{"beta", r.beta.str()}, {"Q", q}});
    }
    j["ladder"] = lad;
    if (d.cut) j["cut"] = d.cut->str();
    return j.dump();
}

std::string to_json(const DulacSeriesZ& d) {
    json j;
    j["lambda"] = detail::coeff_json(d.lambda);
    j["alpha"] = d.alpha.str();
    j["mode"] = d.mode == Mode::exact ? "exact" : "float";
    json lad = json::array();
    for (auto& r : d.ladder) {
        json p = json::array();
        for (auto& c : r.P) p.push_back(c.str());
        lad.push_back({{"alpha", r.alpha.str()}, {"P", p}});
    }
    j["ladder"] = lad;
    if (d.cut) j["cut"] = d.cut->str();
    return j.dump();
}

DulacSeriesZeta dulac_zeta_from_json(const std::string& text) {
    json j = parse_json(text);
    try {
        DulacSeriesZeta d;
        d.mode = j.value("mode", std::string("exact")) == "exact" ? Mode::exact : Mode::floating;
        d.alpha = Q::parse(j.at("alpha").get<std::string>());
        if (j.contains("c0")) d.c0 = detail::parse_coeff(j["c0"], d.mode);
        if (j.contains("cut")) d.cut = Q::parse(j["cut"].get<std::string>());
        for (auto& r : j.at("ladder")) {
            ZetaRung z{Q::parse(r.at("beta").get<std::string>()), {}};
            for (auto& c : r.at("Q")) z.poly.push_back(parse_coeff_text(c.get<std::string>(), d.mode));
            trim(z.poly);
            d.ladder.push_back(z);
        }
        d.validate();
        return d;
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("malformed Dulac JSON: ") + e.what());
    }
}

DulacSeriesZ dulac_z_from_json(const std::string& text) {
    json j = parse_json(text);
    try {
        DulacSeriesZ d;
        d.mode = j.value("mode", std::string("exact")) == "exact" ? Mode::exact : Mode::floating;
        d.alpha = Q::parse(j.at("alpha").get<std::string>());
        if (j.contains("lambda")) d.lambda = detail::parse_coeff(j["lambda"], d.mode);
        if (j.contains("cut")) d.cut = Q::parse(j["cut"].get<std::string>());
        for (auto& r : j.at("ladder")) {
            DulacRung z{Q::parse(r.at("alpha").get<std::string>()), {}};
            for (auto& c : r.at("P")) z.P.push_back(parse_coeff_text(c.get<std::string>(), d.mode));
            trim(z.P);
            d.ladder.push_back(z);
        }
        d.validate();
        return d;
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("malformed Dulac JSON: ") + e.what());
    }
}

} // namespace lts
