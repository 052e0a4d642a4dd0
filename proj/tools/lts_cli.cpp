#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lts/analytic.hpp"
#include "lts/compose.hpp"
#include "lts/dulac.hpp"
#include "lts/map_expr.hpp"
#include "lts/normalize.hpp"
#include "lts/parse.hpp"

using namespace lts;
using nlohmann::json;

namespace {

struct RunConfig {
    int depth = 2;
    std::string z_cap = "8";
    int block_cap = 8;
    std::string mode = "exact";
    bool json_out = false;
    double tol = 1e-12;
    double r_ceiling = 1e4;
    double alpha = 2, eps = 1;
    int k = 0;
    double sqd_C = 1;
    double grid_span = 20;
    int grid_re = 20, grid_im = 2;

    TruncationGrid grid() const {
        TruncationGrid g;
        g.depth = depth;
        g.z_cap = Q::parse(z_cap);
        g.block_cap = block_cap;
        g.validate();
        return g;
    }
    Mode series_mode() const {
        if (mode == "exact") return Mode::exact;
        if (mode == "float") return Mode::floating;
        fail(ErrorKind::precondition, "mode must be exact or float");
    }
    AsymptoticSpec spec() const { return {alpha, eps, k, 0}; }
    GridSpec grid_spec() const {
        GridSpec g;
        g.span = grid_span;
        g.n_re = grid_re;
        g.n_im = grid_im;
        return g;
    }
};

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::parse: return 4;
    case ErrorKind::certification:
    case ErrorKind::invariance_violation: return 3;
    case ErrorKind::internal: return 1;
    default: return 2;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::precondition, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TransSeries parse_input(const RunConfig& c, const std::string& text) {
    return parse_series(text, c.grid(), c.series_mode());
}

// a series given as an expression, a series JSON file, or a normalize --json dump
TransSeries load_series(const RunConfig& c, const std::string& arg) {
    std::string text = arg;
    if (std::filesystem::is_regular_file(arg)) text = read_file(arg);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            fail(ErrorKind::parse, std::string("invalid JSON: ") + e.what());
        }
        if (j.contains("phi") && j["phi"].is_object()) return series_from_json(j["phi"].dump());
        return series_from_json(text);
    }
    return parse_input(c, text);
}

void print_report(const VerificationReport& r, int depth) {
    std::cout << "conjugation: " << (r.conjugation_ok ? "ok" : "FAIL") << "\n"
              << "order bound: " << (r.order_bound_ok ? "ok" : "FAIL") << "\n"
              << "support:     " << (r.support_ok ? "ok" : "FAIL") << "\n";
    if (!r.offending.empty()) {
        std::cout << "offending keys:";
        for (auto& k : r.offending) std::cout << " " << k.str(depth);
        std::cout << "\n";
    }
}

bool report_ok(const VerificationReport& r) { return r.conjugation_ok && r.order_bound_ok && r.support_ok; }

json series_j(const TransSeries& s) { return json::parse(to_json(s)); }

int cmd_normalize(const RunConfig& c, const std::string& expr, bool verify) {
    TransSeries f = parse_input(c, expr);
    NormalizationResult r = normalize(f, verify);
    if (c.json_out) {
        std::cout << to_json(r) << "\n";
    } else {
        std::cout << "f    = " << f.str() << "\n"
                  << "phi  = " << r.phi.str() << "\n"
                  << "phi1 = " << r.phi1.str() << "\n"
                  << "beta = " << r.beta.str() << ", iterations = " << r.iterations
                  << ", certified order = " << r.achieved_order.str() << "\n";
        if (verify) print_report(r.report, f.depth());
    }
    return !verify || report_ok(r.report) ? 0 : 3;
}

int cmd_prenormalize(const RunConfig& c, const std::string& expr) {
    TransSeries f = parse_input(c, expr);
    TransSeries phi1 = prenormalize(f);
    TransSeries f2 = conjugate(phi1, f);
    if (c.json_out)
        std::cout << json{{"phi1", series_j(phi1)}, {"conjugated", series_j(f2)}}.dump() << "\n";
    else
        std::cout << "phi1 = " << phi1.str() << "\n"
                  << "phi1 o f o phi1^-1 = " << f2.str() << "\n";
    return 0;
}

int cmd_bottcher(const RunConfig& c, const std::string& expr, int n, const std::string& seed) {
    TransSeries f = parse_input(c, expr);
    TransSeries h = parse_input(c, seed);
    json arr = json::array();
    for (int i = 0; i <= n; ++i) {
        if (i > 0) h = bottcher_op(f, h);
        if (c.json_out) arr.push_back(series_j(h));
        else std::cout << "h_" << i << " = " << h.str() << "\n";
    }
    if (c.json_out) std::cout << arr.dump() << "\n";
    return 0;
}

int cmd_support(const RunConfig& c, const std::string& expr, bool enumerate) {
    TransSeries f = parse_input(c, expr);
    SemigroupSpec spec = support_predict(f);
    NormalizationResult r = normalize(f, false);
    std::vector<ExponentKey> off;
    bool ok = support_contained(r.phi, spec, &off);
    if (c.json_out) {
        json g = json::array(), e = json::array(), o = json::array();
        for (auto& k : spec.generators) g.push_back(k.str(c.depth));
        if (enumerate)
            for (auto& k : spec.enumerate()) e.push_back(k.str(c.depth));
        for (auto& k : off) o.push_back(k.str(c.depth));
        std::cout << json{{"generators", g}, {"cutoff", spec.z_cutoff.str()}, {"enumeration", e},
                          {"contained", ok}, {"offending", o}}
                         .dump()
                  << "\n";
    } else {
        std::cout << "generators:";
        for (auto& k : spec.generators) std::cout << " " << k.str(c.depth);
        std::cout << "\ncutoff: z^" << spec.z_cutoff.str() << "\n";
        if (enumerate) {
            std::cout << "semigroup:";
            for (auto& k : spec.enumerate()) std::cout << " " << k.str(c.depth);
            std::cout << "\n";
        }
        std::cout << "supp(phi) contained: " << (ok ? "yes" : "NO") << "\n";
        for (auto& k : off) std::cout << "  outside: " << k.str(c.depth) << "\n";
    }
    return ok ? 0 : 3;
}

int cmd_verify(const RunConfig& c, const std::string& fexpr, const std::string& phi_arg) {
    TransSeries f = parse_input(c, fexpr);
    TransSeries phi = load_series(c, phi_arg);
    VerificationReport r = verify_normalization(f, phi);
    bool ok = report_ok(r);
    if (c.json_out) {
        json o = json::array();
        for (auto& k : r.offending) o.push_back(k.str(c.depth));
        std::cout << json{{"pass", ok},
                          {"conjugation_ok", r.conjugation_ok},
                          {"order_bound_ok", r.order_bound_ok},
                          {"support_ok", r.support_ok},
                          {"conjugate", r.conjugate},
                          {"offending", o}}
                         .dump()
                  << "\n";
    } else {
        print_report(r, f.depth());
        std::cout << (ok ? "pass" : "fail") << "\n";
    }
    return ok ? 0 : 3;
}

DomainSpec sqd(const RunConfig& c) { return DomainSpec::standard_quadratic(c.sqd_C); }

int cmd_domain_check(const RunConfig& c, const std::string& map) {
    MapExpr f = MapExpr::parse(map);
    double R = invariant_threshold(f.as_map(), c.spec(), sqd(c), c.grid_spec(), c.r_ceiling);
    if (c.json_out)
        std::cout << json{{"R", R}, {"rho_R", rho_of(c.spec(), R)}, {"map", map}}.dump() << "\n";
    else
        std::cout << "certified R = " << R << " (rho(R) = " << rho_of(c.spec(), R) << ")\n";
    return 0;
}

int cmd_koenigs(const RunConfig& c, const std::string& map, const std::string& csv) {
    MapExpr f = MapExpr::parse(map);
    double R = invariant_threshold(f.as_map(), c.spec(), sqd(c), c.grid_spec(), c.r_ceiling);
    KoenigsResult k = koenigs_normalize(f.as_map(), c.spec(), sqd(c), R, c.tol);
    auto samples = evaluate_grid(k, domain_samples(k.domain, R, c.grid_spec()));
    double max_res = 0;
    bool ok = true;
    for (auto& s : samples) {
        max_res = std::max(max_res, s.residual);
        ok = ok && s.tangent_ok && s.residual <= 2 * (c.alpha + 1) * s.residual_bound;
    }
    if (!csv.empty()) {
        std::ofstream out(csv);
        write_samples_csv(out, samples);
    }
    if (c.json_out) {
        std::cout << json{{"R", R}, {"pass", ok}, {"max_residual", max_res},
                          {"samples", json::parse(samples_to_json(samples))}}
                         .dump()
                  << "\n";
    } else {
        std::cout << "certified R = " << R << "\n"
                  << samples.size() << " samples, max |phi(f) - alpha phi| = " << max_res << "\n"
                  << "tangent bound and residual bound: " << (ok ? "ok" : "FAIL") << "\n";
    }
    return ok ? 0 : 3;
}

int cmd_homological(const RunConfig& c, const std::string& map, const std::string& g_text, double nu) {
    MapExpr f = MapExpr::parse(map), g = MapExpr::parse(g_text);
    double R = invariant_threshold(f.as_map(), c.spec(), sqd(c), c.grid_spec(), c.r_ceiling);
    auto h = solve_homological(f.as_map(), g.as_map(), nu, c.spec(), sqd(c), R, c.tol, c.grid_spec());
    DomainSpec d = sqd(c);
    auto samples = check_homological(h, f.as_map(), g.as_map(), c.alpha, domain_samples(d, R, c.grid_spec()));
    double max_res = 0, max_scaled = 0;
    for (auto& s : samples) {
        max_res = std::max(max_res, s.residual);
        max_scaled = std::max(max_scaled, s.scaled);
    }
    if (c.json_out)
        std::cout << json{{"R", R}, {"max_residual", max_res}, {"max_scaled", max_scaled}}.dump() << "\n";
    else
        std::cout << "certified R = " << R << "\nmax |phi_g(f) - alpha phi_g - g| = " << max_res
                  << "\nmax |phi_g| e^{nu Re zeta} = " << max_scaled << "\n";
    return 0;
}

Q zeta_cap(const RunConfig& c, const Q& alpha) { return c.grid().z_cap - alpha; }

int cmd_to_zeta(const RunConfig& c, const std::string& arg) {
    TransSeries f = load_series(c, arg);
    DulacSeriesZ d = from_transseries(f);
    DulacSeriesZeta z = to_zeta_chart(d, zeta_cap(c, d.alpha));
    std::cout << (c.json_out ? to_json(z) : str(z)) << "\n";
    return 0;
}

int cmd_to_z(const RunConfig& c, const std::string& arg) {
    std::string text = std::filesystem::is_regular_file(arg) ? read_file(arg) : arg;
    DulacSeriesZeta z = dulac_zeta_from_json(text);
    DulacSeriesZ d = to_z_chart(z, zeta_cap(c, z.alpha));
    std::cout << (c.json_out ? to_json(d) : str(d)) << "\n";
    return 0;
}

int cmd_compare(const RunConfig& c, const std::string& formal, const std::string& map, int n_max,
                const std::string& csv_prefix) {
    TransSeries fz = parse_input(c, formal);
    DulacSeriesZ d = from_transseries(fz);
    DulacSeriesZ phi_z = dulac_normalize_formal(d, c.grid());
    DulacSeriesZeta phi_hat = to_zeta_chart(phi_z, c.grid().z_cap - Q(1));
    MapExpr f = MapExpr::parse(map);
    AsymptoticSpec s = c.spec();
    s.alpha = d.alpha.to_double();
    double R = invariant_threshold(f.as_map(), s, sqd(c), c.grid_spec(), c.r_ceiling);
    KoenigsResult k = koenigs_normalize(f.as_map(), s, sqd(c), R, c.tol, f.as_map_hp());
    RaySpec ray;
    ray.x0 = R;
    ray.x1 = R + c.grid_span;
    n_max = std::min<int>(n_max, int(phi_hat.ladder.size()));
    bool ok = true;
    json reps = json::array();
    if (!c.json_out) std::cout << "phi_hat = " << str(phi_hat) << "\ncertified R = " << R << "\n";
    for (int n = 1; n <= n_max; ++n) {
        DecayReport r = compare_formal_numeric(k, phi_hat, n, ray);
        ok = ok && r.bounded && r.decays;
        if (!csv_prefix.empty()) {
            std::ofstream out(csv_prefix + std::to_string(n) + ".csv");
            write_decay_csv(out, r);
        }
        if (c.json_out)
            reps.push_back({{"n", n}, {"bounded", r.bounded}, {"decays", r.decays}, {"slope", r.slope},
                            {"detail", r.detail}});
        else
            std::cout << "n=" << n << ": " << (r.bounded && r.decays ? "bounded, decaying" : "FAIL") << " ("
                      << r.detail << ")\n";
    }
    if (c.json_out)
        std::cout << json{{"phi_hat", json::parse(to_json(phi_hat))}, {"R", R}, {"reports", reps}, {"pass", ok}}.dump()
                  << "\n";
    return ok ? 0 : 3;
}

int cmd_selftest(const RunConfig&) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };
    TruncationGrid g;
    g.z_cap = Q(8);
    g.block_cap = 8;
    g.depth = 2;
    {
        NormalizationResult r = normalize(parse_series("z^2+z^3", g));
        check("normalize z^2+z^3: a2 = 1/2, a3 = 1/8",
              r.phi.coeff({Q(2), {}}) == Coeff::rat(1, 2) && r.phi.coeff({Q(3), {}}) == Coeff::rat(1, 8) &&
                  report_ok(r.report));
    }
    {
        NormalizationResult r = normalize(parse_series("z^2+z^2*l1", g));
        check("normalize z^2+z^2*l1 verifies", report_ok(r.report));
    }
    {
        AsymptoticSpec s{2, 1, 0, 0};
        auto dom = DomainSpec::standard_quadratic(1);
        CMap f = [](cd z) { return 2.0 * z + std::exp(-z); };
        double R = invariant_threshold(f, s, dom);
        auto k = koenigs_normalize(f, s, dom, R, 1e-13);
        auto v = evaluate_grid(k, domain_samples(k.domain, R, {}));
        bool ok = true;
        for (auto& x : v) ok = ok && x.residual < 1e-10 && x.tangent_ok;
        check("Koenigs residual on the standard quadratic domain", ok);
    }
    {
        DulacSeriesZ d;
        d.alpha = Q(2);
        d.ladder.push_back({Q(3), {Coeff(0), Coeff(1)}});
        check("Dulac chart round trip", to_z_chart(to_zeta_chart(d, Q(4)), Q(4)) == d);
    }
    return failures ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Normalization of logarithmic transseries and Dulac germs"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig c;
    app.set_config("--config", "", "key=value config file")->envname("LTS_CONFIG");
    app.add_option("--depth", c.depth, "number of iterated logarithms l1..lK");
    app.add_option("--z-cap", c.z_cap, "z-order truncation (rational)");
    app.add_option("--block-cap", c.block_cap, "terms kept per z-block");
    app.add_option("--mode", c.mode, "exact or float");
    app.add_flag("--json", c.json_out, "machine-readable output");
    app.add_option("--tol", c.tol, "tail tolerance for analytic iterations");
    app.add_option("--R-ceiling", c.r_ceiling, "largest R tried by the invariance search");
    app.add_option("--alpha", c.alpha, "analytic type: alpha");
    app.add_option("--eps", c.eps, "analytic type: eps");
    app.add_option("--k", c.k, "analytic type: k");
    app.add_option("--sqd-C", c.sqd_C, "standard quadratic domain constant");
    app.add_option("--grid-span", c.grid_span, "sample window width in Re zeta");
    app.add_option("--grid-re", c.grid_re, "sample columns");
    app.add_option("--grid-im", c.grid_im, "imaginary levels per side");

    std::string expr, seed = "z", f_arg, phi_arg, map = "2*zeta+exp(-zeta)", g_arg = "exp(-zeta)", csv,
                      formal = "z^2*exp(-z)";
    int n = 5, n_max = 3;
    double nu = 1;
    bool no_verify = false, enumerate = false;

    auto* norm = app.add_subcommand("normalize", "normalization phi with phi o f o phi^-1 = z^alpha");
    norm->add_option("expr", expr)->required();
    norm->add_flag("--no-verify", no_verify);
    auto* pre = app.add_subcommand("prenormalize", "prenormalization phi1 = id + zS");
    pre->add_option("expr", expr)->required();
    auto* bs = app.add_subcommand("bottcher-seq", "Bottcher sequence h -> z^(1/alpha) o h o f");
    bs->add_option("expr", expr)->required();
    bs->add_option("--n", n, "number of steps");
    bs->add_option("--seed", seed, "initial h");
    auto* sup = app.add_subcommand("support", "predicted support semigroup and containment of supp(phi)");
    sup->add_option("expr", expr)->required();
    sup->add_flag("--enumerate", enumerate);
    auto* ver = app.add_subcommand("verify", "check a claimed normalization");
    ver->add_option("--f", f_arg)->required();
    ver->add_option("--phi", phi_arg, "expression, series JSON file or normalize --json output")->required();

    auto* an = app.add_subcommand("analytic", "zeta-chart analytic normalization");
    an->require_subcommand(1);
    auto* dc = an->add_subcommand("domain-check", "certify an invariant half-plane cut R");
    dc->add_option("--map", map);
    auto* ko = an->add_subcommand("koenigs", "Koenigs iteration on the sample grid");
    ko->add_option("--map", map);
    ko->add_option("--csv", csv, "write samples as CSV");
    auto* ho = an->add_subcommand("homological", "solve phi_g o f - alpha phi_g = g");
    ho->add_option("--map", map);
    ho->add_option("--g", g_arg);
    ho->add_option("--nu", nu);

    auto* br = app.add_subcommand("bridge", "Dulac chart conversions and formal/numeric comparison");
    br->require_subcommand(1);
    auto* tz = br->add_subcommand("to-zeta", "z-chart Dulac series to the zeta chart");
    tz->add_option("expr", expr, "expression or series JSON file")->required();
    auto* tzz = br->add_subcommand("to-z", "zeta-chart Dulac JSON to the z chart");
    tzz->add_option("file", expr, "Dulac JSON text or file")->required();
    auto* cmp = br->add_subcommand("compare", "formal vs numeric normalization along a ray");
    cmp->add_option("--formal", formal, "z-chart expansion of the map");
    cmp->add_option("--map", map, "zeta-chart map");
    cmp->add_option("--n", n_max, "largest partial normalization");
    cmp->add_option("--csv", csv, "CSV prefix for the statistics");

    auto* st = app.add_subcommand("selftest", "quick end-to-end checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }

    try {
        if (*norm) return cmd_normalize(c, expr, !no_verify);
        if (*pre) return cmd_prenormalize(c, expr);
        if (*bs) return cmd_bottcher(c, expr, n, seed);
        if (*sup) return cmd_support(c, expr, enumerate);
        if (*ver) return cmd_verify(c, f_arg, phi_arg);
        if (*dc) return cmd_domain_check(c, map);
        if (*ko) return cmd_koenigs(c, map, csv);
        if (*ho) return cmd_homological(c, map, g_arg, nu);
        if (*tz) return cmd_to_zeta(c, expr);
        if (*tzz) return cmd_to_z(c, expr);
        if (*cmp) return cmd_compare(c, formal, map, n_max, csv);
        if (*st) return cmd_selftest(c);
    } catch (const Error& e) {
        std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
