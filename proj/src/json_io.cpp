#include "lts/json_detail.hpp"
#include "lts/normalize.hpp"

namespace lts {

using nlohmann::json;

namespace {

json key_l(const LKey& k, int depth) {
    json a = json::array();
    for (int i = 0; i < depth; ++i) a.push_back(k.e[i]);
    return a;
}

LKey parse_l(const json& a) {
    LKey k;
    if (a.size() > std::size_t(kMaxDepth)) fail(ErrorKind::depth_overflow, "l-exponent vector too long");
    for (std::size_t i = 0; i < a.size(); ++i) k.e[i] = a[i].get<std::int32_t>();
    return k;
}

json bound_json(const LBound& b, int depth) {
    if (b.is_inf()) return nullptr;
    if (!b.finite()) return "-inf";
    return key_l(b.k, depth);
}

LBound parse_bound(const json& j) {
    if (j.is_null()) return LBound::inf();
    if (j.is_string()) return LBound::neg();
    return LBound::at(parse_l(j));
}

} // namespace

namespace detail {

json coeff_json(const Coeff& c, json t) {
    t["re"] = c.re_str();
    t["im"] = c.im_str();
    if (c.is_exact() && !c.is_constant()) {
        json logs = json::array();
        for (auto& term : c.terms()) {
            if (term.mono.empty()) continue;
            json mono = json::array();
            for (auto& [p, e] : term.mono) mono.push_back({p, e});
            logs.push_back({{"mono", mono}, {"re", rat_str(term.c.re)}, {"im", rat_str(term.c.im)}});
        }
        t["logs"] = logs;
    }
    return t;
}

Coeff parse_coeff(const json& t, Mode mode) {
    if (mode == Mode::floating)
        return Coeff::from_float({std::stod(t.at("re").get<std::string>()), std::stod(t.at("im").get<std::string>())});
    Coeff c(parse_rat(t.at("re").get<std::string>()), parse_rat(t.at("im").get<std::string>()));
    if (t.contains("logs"))
        for (auto& l : t["logs"]) {
            Coeff m(parse_rat(l.at("re").get<std::string>()), parse_rat(l.at("im").get<std::string>()));
            for (auto& pe : l.at("mono"))
                for (int e = 0; e < pe[1].get<int>(); ++e) m = m * Coeff::log_symbol(pe[0].get<std::uint32_t>());
            c += m;
        }
    return c;
}

json series_json(const TransSeries& f) {
    const int K = f.depth();
    json j;
    j["depth"] = K;
    j["mode"] = f.mode() == Mode::exact ? "exact" : "float";
    j["grid"] = {{"z_cap", f.grid().z_cap.str()}, {"block_cap", f.grid().block_cap}};
    json terms = json::array();
    for (auto& [k, c] : f.term_list())
        terms.push_back(coeff_json(c, {{"z", k.z.str()}, {"l", key_l(k.l, K)}}));
    j["terms"] = terms;
    json blocks = json::array();
    for (auto& [z, b] : f.blocks())
        if (!b.frontier.is_inf()) blocks.push_back({{"z", z.str()}, {"l", bound_json(b.frontier, K)}});
    j["block_frontiers"] = blocks;
    j["zf"] = f.zf() ? json(f.zf()->str()) : json(nullptr);
    Frontier fr = f.exact_frontier();
    if (fr.infinite) j["frontier"] = nullptr;
    else j["frontier"] = {{"z", fr.z.str()}, {"l", fr.block_start ? json(nullptr) : key_l(fr.l, K)}};
    return j;
}

} // namespace detail

using detail::coeff_json;
using detail::parse_coeff;

std::string to_json(const TransSeries& f) { return detail::series_json(f).dump(); }

TransSeries series_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("invalid JSON: ") + e.what());
    }
    try {
        TruncationGrid g;
        g.depth = j.at("depth").get<int>();
        if (j.contains("grid")) {
            g.z_cap = Q::parse(j["grid"].at("z_cap").get<std::string>());
            g.block_cap = j["grid"].at("block_cap").get<int>();
        }
        g.validate();
        Mode mode = j.value("mode", std::string("exact")) == "exact" ? Mode::exact : Mode::floating;
        TransSeries s(g, mode);
        for (auto& t : j.at("terms"))
            s.add_term({Q::parse(t.at("z").get<std::string>()), parse_l(t.at("l"))}, parse_coeff(t, mode));
        if (j.contains("block_frontiers"))
            for (auto& b : j["block_frontiers"])
                s.lower_block_frontier(Q::parse(b.at("z").get<std::string>()), parse_bound(b.at("l")));
        if (j.contains("zf") && !j["zf"].is_null()) s.lower_zf(Q::parse(j["zf"].get<std::string>()));
        s.normalize();
        return s;
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("malformed series JSON: ") + e.what());
    }
}

std::string to_json(const NormalizationResult& r) {
    json j;
    j["phi"] = detail::series_json(r.phi);
    j["phi1"] = detail::series_json(r.phi1);
    j["phi2"] = detail::series_json(r.phi2);
    j["psi"] = detail::series_json(r.psi);
    j["phi_str"] = r.phi.str();
    j["alpha"] = r.alpha.str();
    j["beta"] = r.beta.str();
    j["inverted"] = r.inverted;
    j["iterations"] = r.iterations;
    j["achieved_order"] = r.achieved_order.str();
    json off = json::array();
    for (auto& k : r.report.offending) off.push_back(k.str(r.phi.depth()));
    j["report"] = {{"conjugation_ok", r.report.conjugation_ok},
                   {"order_bound_ok", r.report.order_bound_ok},
                   {"support_ok", r.report.support_ok},
                   {"conjugate", r.report.conjugate},
                   {"offending", off}};
    return j.dump();
}

} // namespace lts
