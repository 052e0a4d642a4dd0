#ifndef LTS_DULAC_HPP
#define LTS_DULAC_HPP

#include <ostream>
#include <string>
#include <vector>

#include "lts/analytic.hpp"
#include "lts/series.hpp"

namespace lts {

// z^alpha_i P(-log z); P[j] multiplies (-log z)^j
struct DulacRung {
    Q alpha;
    std::vector<Coeff> P;
};

struct DulacSeriesZ {
    Coeff lambda = Coeff(1);
    Q alpha = Q(1);
    std::vector<DulacRung> ladder;
    Mode mode = Mode::exact;
    std::optional<Q> cut;  // z-orders at or above this are unknown; nullopt means the ladder is exact
    void validate() const;
    bool is_real() const;
};

// e^{-beta zeta} Q(zeta); poly[j] multiplies zeta^j
struct ZetaRung {
    Q beta;
    std::vector<Coeff> poly;
};

// alpha zeta + c0 + sum_i e^{-beta_i zeta} Q_i(zeta), c0 = -log lambda
struct DulacSeriesZeta {
    Q alpha = Q(1);
    Coeff c0;
    std::vector<ZetaRung> ladder;
    Mode mode = Mode::exact;
    std::optional<Q> cut;  // e^{-1} orders at or above this are unknown
    void validate() const;
    bool is_real() const;
    // min beta with Q nonzero; nullopt for an empty ladder
    std::optional<Q> order_e() const;
};

// rungs are kept for beta < min(cap, d.cut - alpha); the result's cut records that bound
DulacSeriesZeta to_zeta_chart(const DulacSeriesZ& d, const Q& cap);
// rungs are kept for alpha_i < alpha + min(cap, d.cut)
DulacSeriesZ to_z_chart(const DulacSeriesZeta& d, const Q& cap);

bool is_dulac(const TransSeries& f);
TransSeries to_transseries(const DulacSeriesZ& d, const TruncationGrid& g);
// complete blocks only; the ladder stops at the first truncated block
DulacSeriesZ from_transseries(const TransSeries& f);

DulacSeriesZ dulac_normalize_formal(const DulacSeriesZ& d, const TruncationGrid& g);

// zeta + first n rungs
DulacSeriesZeta partial_normalizations(const DulacSeriesZeta& phi, int n);

cd evaluate(const DulacSeriesZeta& d, cd zeta);
cx_hp evaluate_hp(const DulacSeriesZeta& d, const cx_hp& zeta);
cx_hp coeff_hp(const Coeff& c);

bool operator==(const DulacSeriesZ& a, const DulacSeriesZ& b);
bool operator==(const DulacSeriesZeta& a, const DulacSeriesZeta& b);
std::string str(const DulacSeriesZ& d);
std::string str(const DulacSeriesZeta& d);

// Empirical decay of a sampled statistic: the last tenth of the grid averages
// below ratio x the first tenth and the least-squares slope of log(stat) is negative.
struct DecayCriteria {
    double ratio = 0.5;
};

struct DecayReport {
    std::vector<double> x, stat;
    bool identically_zero = false;
    bool bounded = false;
    bool decays = false;
    double slope = 0;     // d log(stat) / d Re zeta
    double eps_hat = 0;   // -slope
    std::string detail;
};
DecayReport assess_decay(std::vector<double> x, std::vector<double> stat, DecayCriteria c = {});

struct RaySpec {
    double x0 = 2, x1 = 22;
    int n = 41;
    std::vector<double> im{0.0};
};

// sup over im levels of |phi_n(f z) - alpha phi_n(z)| e^{beta_n Re z}
DecayReport defect_decay_check(const CMap& f, double alpha, const DulacSeriesZeta& phi_n, const Q& beta_n,
                               const RaySpec& grid, const CMapHP& f_hp = nullptr, DecayCriteria c = {},
                               bool parallel = true);

// sup over im levels of |phi(z) - phi_hat_n(z)| e^{beta_n Re z}; n = 0 uses beta_0 = 0
DecayReport compare_formal_numeric(const KoenigsResult& phi, const DulacSeriesZeta& phi_hat, int n,
                                   const RaySpec& ray, DecayCriteria c = {}, bool parallel = true);

void write_decay_csv(std::ostream& os, const DecayReport& r);

std::string to_json(const DulacSeriesZeta& d);
std::string to_json(const DulacSeriesZ& d);
DulacSeriesZeta dulac_zeta_from_json(const std::string& text);
DulacSeriesZ dulac_z_from_json(const std::string& text);

} // namespace lts

#endif
