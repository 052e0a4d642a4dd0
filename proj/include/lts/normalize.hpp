#ifndef LTS_NORMALIZE_HPP
#define LTS_NORMALIZE_HPP

#include <string>
#include <vector>

#include "lts/compose.hpp"

namespace lts {

struct VerificationReport {
    bool conjugation_ok = false;  // phi o f o phi^-1 = z^alpha below the frontier
    bool order_bound_ok = false;
    bool support_ok = false;
    std::string conjugate;        // the computed conjugate
    std::vector<ExponentKey> offending;  // retained keys that break the checks
};

struct NormalizationResult {
    TransSeries phi, phi1, phi2;
    TransSeries psi;          // leading-coefficient scaling applied first (id when lambda = 1)
    bool inverted = false;    // alpha < 1 was handled through the inverse
    Q alpha, beta;
    int iterations = 0;
    Q achieved_order;
    VerificationReport report;
};

// z^(1/alpha) o h o f for f = z^alpha + h.o.t.
TransSeries bottcher_op(const TransSeries& f, const TransSeries& h);
NormalizationResult normalize_direct(const TransSeries& f);
// canonical phi1 = id + zS killing the z^alpha block of f
TransSeries prenormalize(const TransSeries& f);
NormalizationResult normalize(const TransSeries& f, bool verify_result = true);
TransSeries bottcher_sequence(const TransSeries& f, const TransSeries& h, int n);

struct ConvergenceMode {
    bool weak_always = true;
    bool power_metric = false;
};
ConvergenceMode convergence_mode(const TransSeries& f, const TransSeries& h);

// prenormalization operators on blocks S (pure l-series)
TransSeries prenorm_block(const TransSeries& f);  // R with f = z^alpha(1+R) + h.o.b.
TransSeries op_R(const TransSeries& f, const TransSeries& T);  // R_f(id + zT)
TransSeries op_T(const TransSeries& f, const TransSeries& S);
TransSeries op_K(const TransSeries& f, const TransSeries& S);
TransSeries op_S(const TransSeries& f, const TransSeries& S);

// Semigroup generated by non-unit generators plus the positive l-units.
struct SemigroupSpec {
    int depth = 1;
    std::vector<ExponentKey> generators;
    Q z_cutoff;
    int l_window = 16;  // bound on |l|_1 while enumerating
    bool contains(const ExponentKey& k) const;
    // sums of non-unit generators below the cutoff, lex ascending
    std::vector<ExponentKey> enumerate() const;
};
SemigroupSpec support_predict(const TransSeries& f);
// generators bounding supp(f o g)
SemigroupSpec support_of_composition_bound(const TransSeries& g, const TransSeries& f);
bool support_contained(const TransSeries& s, const SemigroupSpec& spec, std::vector<ExponentKey>* offending = nullptr,
                       bool parallel = true);

// lower bound for ord_z, counting frontiers as possible terms; nullopt is +infinity
std::optional<Q> ord_z_bound(const TransSeries& f);
bool order_bound_check(const TransSeries& f, const TransSeries& phi);
bool binomial_bound_check(const Q& alpha, int n, int i);

struct VerifyOptions {
    bool parallel = true;
};
VerificationReport verify_normalization(const TransSeries& f, const TransSeries& phi, VerifyOptions opt = {});

std::string to_json(const NormalizationResult& r);

} // namespace lts

#endif
