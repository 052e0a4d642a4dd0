#ifndef LTS_SERIES_HPP
#define LTS_SERIES_HPP

#include <array>
#include <compare>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lts/coeff.hpp"
#include "lts/errors.hpp"
#include "lts/qexp.hpp"

namespace lts {

constexpr int kMaxDepth = 4;

// exponents of l_1..l_K; unused trailing slots stay zero
struct LKey {
    std::array<std::int32_t, kMaxDepth> e{};

    static LKey unit(int m) {  // m is 1-based
        LKey k;
        k.e[m - 1] = 1;
        return k;
    }
    bool is_zero() const {
        for (auto v : e)
            if (v) return false;
        return true;
    }
    friend auto operator<=>(const LKey&, const LKey&) = default;
    friend LKey operator+(LKey a, const LKey& b) {
        for (int i = 0; i < kMaxDepth; ++i) a.e[i] += b.e[i];
        return a;
    }
    friend LKey operator-(LKey a, const LKey& b) {
        for (int i = 0; i < kMaxDepth; ++i) a.e[i] -= b.e[i];
        return a;
    }
    LKey operator-() const { return LKey{} - *this; }
    LKey times(std::int64_t s) const {
        LKey r;
        for (int i = 0; i < kMaxDepth; ++i) r.e[i] = std::int32_t(e[i] * s);
        return r;
    }
    int used_depth() const {
        for (int i = kMaxDepth; i > 0; --i)
            if (e[i - 1]) return i;
        return 0;
    }
};

struct ExponentKey {
    Q z;
    LKey l;
    friend auto operator<=>(const ExponentKey&, const ExponentKey&) = default;
    friend ExponentKey operator+(const ExponentKey& a, const ExponentKey& b) { return {a.z + b.z, a.l + b.l}; }
    friend ExponentKey operator-(const ExponentKey& a, const ExponentKey& b) { return {a.z - b.z, a.l - b.l}; }
    std::string str(int depth) const;
};

// lower bound for l-keys inside one z-block
struct LBound {
    enum class Kind : std::int8_t { neg_inf, finite, pos_inf };
    Kind kind = Kind::pos_inf;
    LKey k{};

    static LBound inf() { return {}; }
    static LBound neg() { return {Kind::neg_inf, {}}; }
    static LBound at(const LKey& k) { return {Kind::finite, k}; }
    bool finite() const { return kind == Kind::finite; }
    bool is_inf() const { return kind == Kind::pos_inf; }
    // is the key strictly below this bound?
    bool above(const LKey& key) const { return kind == Kind::pos_inf || (kind == Kind::finite && key < k); }
    friend bool operator<(const LBound& a, const LBound& b);
    friend bool operator<=(const LBound& a, const LBound& b) { return !(b < a); }
    friend LBound operator+(const LBound& a, const LBound& b);
    friend LBound operator+(const LBound& a, const LKey& b) {
        return a.finite() ? at(a.k + b) : a;
    }
};
inline LBound min(const LBound& a, const LBound& b) { return b < a ? b : a; }

struct TruncationGrid {
    Q z_cap = Q(8);
    int block_cap = 8;
    int depth = 1;
    void validate() const;
};

enum class Mode { exact, floating };

struct ZBlock {
    std::map<LKey, Coeff> terms;
    LBound frontier;  // coefficients at keys below this are exact
};

// The exactness frontier as a single lex key: either a specific key, or the
// start of the z-block at z (block_start), or +infinity.
struct Frontier {
    bool infinite = true;
    Q z;
    bool block_start = false;
    LKey l;
    std::string str(int depth) const;
};

// per-block lower bounds plus a z-cut beyond which nothing is known
struct Profile {
    std::map<Q, LBound> at;
    std::optional<Q> zf;
    LBound get(const Q& z) const;
    void lower(const Q& z, const LBound& b);
    void lower_zf(const Q& z) {
        if (!zf || z < *zf) zf = z;
    }
    // smallest z carrying information (a finite bound or the z-cut)
    std::optional<Q> vz() const;
};

class TransSeries {
public:
    TransSeries() = default;
    explicit TransSeries(const TruncationGrid& g, Mode m = Mode::exact) : grid_(g), mode_(m) {}

    static TransSeries zero(const TruncationGrid& g, Mode m = Mode::exact) { return TransSeries(g, m); }
    static TransSeries monomial(const TruncationGrid& g, const Coeff& c, const ExponentKey& k);
    static TransSeries constant(const TruncationGrid& g, const Coeff& c) { return monomial(g, c, {Q(0), {}}); }
    static TransSeries identity(const TruncationGrid& g) { return monomial(g, Coeff(1), {Q(1), {}}); }
    static TransSeries z_pow(const TruncationGrid& g, const Q& a) { return monomial(g, Coeff(1), {a, {}}); }
    static TransSeries ell(const TruncationGrid& g, int m, int power = 1);

    const TruncationGrid& grid() const { return grid_; }
    int depth() const { return grid_.depth; }
    Mode mode() const { return mode_; }
    const std::map<Q, ZBlock>& blocks() const { return blocks_; }
    const std::optional<Q>& zf() const { return zf_; }

    // raw mutation, followed by normalize()
    void add_term(const ExponentKey& k, const Coeff& c);
    void set_term(const ExponentKey& k, const Coeff& c);
    void lower_block_frontier(const Q& z, const LBound& b);
    void lower_zf(const Q& z);
    void lower_to(const Profile& p);
    // replace a block wholesale when its exact value is known from elsewhere
    void set_block(const Q& z, const ZBlock& b) { blocks_[z] = b; }
    // prune zeros, drop terms past frontiers, enforce z_cap and block_cap
    void normalize();
    void set_grid(const TruncationGrid& g) { grid_ = g; }
    void set_mode(Mode m) { mode_ = m; }

    Coeff coeff(const ExponentKey& k) const;
    bool is_exact_at(const ExponentKey& k) const;
    Frontier exact_frontier() const;
    std::size_t term_count() const;
    bool is_zero() const { return term_count() == 0; }
    // no retained terms and nothing unknown
    bool is_exact_zero() const { return blocks_.empty() && !zf_; }
    std::vector<std::pair<ExponentKey, Coeff>> term_list() const;

    Profile block_mins() const;
    Profile frontiers() const;

    TransSeries to_float() const;
    TransSeries conj() const;
    TransSeries with_grid(const TruncationGrid& g) const;

    std::string str() const;  // canonical printing, lex ascending

private:
    TruncationGrid grid_;
    Mode mode_ = Mode::exact;
    std::map<Q, ZBlock> blocks_;
    std::optional<Q> zf_;
};

TruncationGrid combine(const TruncationGrid& a, const TruncationGrid& b);

// ring operations
TransSeries add(const TransSeries& a, const TransSeries& b);
TransSeries sub(const TransSeries& a, const TransSeries& b);
TransSeries neg(const TransSeries& a);
TransSeries scale(const TransSeries& a, const Coeff& c);
// multiply by c * z^k.z * l^k.l
TransSeries shift(const TransSeries& a, const Coeff& c, const ExponentKey& k);
TransSeries mul(const TransSeries& a, const TransSeries& b);
inline TransSeries operator+(const TransSeries& a, const TransSeries& b) { return add(a, b); }
inline TransSeries operator-(const TransSeries& a, const TransSeries& b) { return sub(a, b); }
inline TransSeries operator*(const TransSeries& a, const TransSeries& b) { return mul(a, b); }
TransSeries pow_int(const TransSeries& a, int n);

// termwise derivative; d l_m/dz = z^-1 l_1 ... l_(m-1) l_m^2
TransSeries d_dz(const TransSeries& f);

// orders
std::optional<ExponentKey> ord(const TransSeries& f);  // nullopt is +infinity
std::optional<Q> ord_z(const TransSeries& f);
std::pair<ExponentKey, Coeff> leading_term(const TransSeries& f);
TransSeries leading_block(const TransSeries& f);
std::vector<ExponentKey> supp(const TransSeries& f);
std::vector<Q> supp_z(const TransSeries& f);
// block at z^q divided by z^q
TransSeries block_at(const TransSeries& f, const Q& q);
// min over the support of the exponent of l_m (m 1-based); nullopt if empty
std::optional<std::int32_t> ord_ell(const TransSeries& f, int m);

struct Distance {
    double value = 0;
    std::optional<Q> order;          // ord_z of the difference, if visible
    bool indistinguishable = false;  // equal below both frontiers
};
Distance dist_z(const TransSeries& f, const TransSeries& g);

std::vector<Coeff> weak_delta(const std::vector<TransSeries>& seq, const ExponentKey& key);

// analytic-style series operations built on power sums
struct SumOptions {
    int max_terms = 0;  // 0 picks a default from the grid
};
// P * sum_i c(i) u^i for u with positive order; last_nonzero ends a finite sum
TransSeries power_sum(const TransSeries& P, const TransSeries& u, const std::function<Coeff(int)>& c,
                      std::optional<int> last_nonzero = std::nullopt, SumOptions opt = {});
TransSeries inv(const TransSeries& x);
TransSeries div(const TransSeries& a, const TransSeries& b);
TransSeries pow_q(const TransSeries& x, const Q& beta);
// log x with log z = -l1^-1 and log l_m = -l_(m+1)^-1
TransSeries log_series(const TransSeries& x);
TransSeries exp_series(const TransSeries& w);

// generalized binomial coefficient
mpq_class binom(const mpq_class& beta, int i);
Coeff coeff_pow(const Coeff& c, const Q& beta, Mode mode);
Coeff coeff_log(const Coeff& c, Mode mode);

// Pure l-series z^0 R; positivity classes of the block algebras
enum class Positivity { b_m_plus, b_ge_m_plus, unrestricted };

struct Block {
    int depth = 1;
    int start_coord = 1;
    std::map<LKey, Coeff> terms;
    LBound frontier;
    Positivity cls = Positivity::unrestricted;

    static Block from_series(const TransSeries& f, int start_coord = 1,
                             Positivity cls = Positivity::unrestricted);
    TransSeries to_series(const TruncationGrid& g) const;
    bool belongs() const;  // class and start-coordinate invariants
    void validate() const;
    bool is_zero() const { return terms.empty(); }
};

Block D_m(const Block& r, int m);
std::optional<std::int32_t> ord_ell(const Block& r, int m);
// 2^-ord_{l_m}(R - S); indistinguishable when equal below frontiers
Distance dist_m(const Block& r, const Block& s, int m);

// numeric value of the retained terms at z (principal logs)
std::complex<double> evaluate(const TransSeries& f, std::complex<double> z);

// JSON
std::string to_json(const TransSeries& f);
TransSeries series_from_json(const std::string& text);

} // namespace lts

#endif
