#ifndef LTS_ANALYTIC_HPP
#define LTS_ANALYTIC_HPP

#include <complex>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_complex.hpp>

namespace lts {

using cd = std::complex<double>;
// extended precision for tail-dominated comparisons
using cx_hp = boost::multiprecision::cpp_complex_100;

using CMap = std::function<cd(cd)>;
using CMapHP = std::function<cx_hp(cx_hp)>;
using RFun = std::function<double(double)>;

// |f(z) - alpha z| <= M_{eps,k}(Re z) for Re z >= R0
struct AsymptoticSpec {
    double alpha = 2;
    double eps = 1;
    int k = 0;
    double R0 = 0;
};

double exp_iter(int k, double x);  // exp^k(x)
// 1/(log^k x)^eps; k = 0 means x^-eps. Domain error for x <= exp^k(0).
double M_eps_k(double x, double eps, int k);
double rho(double x, double alpha, double eps, int k);
inline double M_of(const AsymptoticSpec& s, double x) { return M_eps_k(x, s.eps, s.k); }
inline double rho_of(const AsymptoticSpec& s, double x) { return rho(x, s.alpha, s.eps, s.k); }

struct MapCheckReport {
    bool ok = false;            // both conditions hold from t_prime to the end of the grid
    bool criterion_ok = false;  // derivative criterion held on the whole grid
    bool defining_ok = false;   // finite-difference inequality held on the whole grid
    double t_prime = 0;
    double witness = 0;         // last violating x (when !ok or t_prime > t)
    std::string detail;
};

// h increasing with h(x+rho) - h(x) >= (alpha-1) h(x) + M; criterion h' >= d + h/x, h/x increasing
MapCheckReport upper_map_check(const RFun& h, const RFun& dh, double d, double t, double interval,
                               const AsymptoticSpec& s, int samples = 2000);
// h decreasing with h(x+rho) - h(x) <= (alpha-1) h(x) - M; criterion h' <= h/x - d, h/x decreasing
MapCheckReport lower_map_check(const RFun& h, const RFun& dh, double d, double t, double interval,
                               const AsymptoticSpec& s, int samples = 2000);

// boundary of kappa(right half-plane), kappa(w) = w + C sqrt(w+1); point kappa(i r)
cd sqd_boundary(double r, double C);
// y o x^-1 for the upper boundary curve; requires x >= C
double sqd_upper(double x, double C);

enum class Membership { member, not_member, indeterminate };
struct MembershipResult {
    Membership status = Membership::indeterminate;
    cd w;  // the Newton preimage
    int iterations = 0;
};
MembershipResult sqd_membership(cd zeta, double C);
const char* membership_name(Membership m);

struct DomainSpec {
    enum class Kind { standard_quadratic, lower_upper };
    Kind kind = Kind::standard_quadratic;
    double C = 1;
    RFun h_l, h_u;
    double t = 0;
    double R = 0;  // half-plane cut

    static DomainSpec standard_quadratic(double C);
    static DomainSpec lower_upper(RFun h_l, RFun h_u, double t);

    // membership in the domain itself; indeterminate counts as outside
    bool contains(cd z) const;
    bool contains_R(cd z) const { return z.real() >= R && contains(z); }
    // open vertical section at Re = x, if nonempty
    std::optional<std::pair<double, double>> section(double x) const;
    std::string describe() const;
};

struct GridSpec {
    double span = 20;    // Re z in [R, R + span]
    int n_re = 20;
    int n_im = 2;        // 2*n_im + 1 imaginary levels per column
    double margin = 1e-3;  // relative distance kept from the boundary
};
std::vector<cd> domain_samples(const DomainSpec& dom, double R, const GridSpec& g);

// smallest grid-certified R on a geometric ladder; certification error past the ceiling
double invariant_threshold(const CMap& f, const AsymptoticSpec& s, const DomainSpec& dom,
                           const GridSpec& g = {}, double R_ceiling = 1e4);

// 2x safety factor on sum_{n>=N} alpha^-(n+1) bound(x0 + n rho(x0))
double certified_tail(const AsymptoticSpec& s, double x0, int N, const RFun& bound);
int tail_index(const AsymptoticSpec& s, double x0, double tol, const RFun& bound);

struct KoenigsSample {
    cd zeta, phi;
    double residual = 0;  // |phi(f z) - alpha phi(z)|
    double residual_bound = 0;
    double tail = 0;
    int N = 0;
    bool tangent_ok = false;  // |phi - z| <= M(Re z)/(1 - 1/alpha)
};

struct KoenigsResult {
    CMap evaluator;
    std::function<int(cd)> iterations_used;
    std::function<double(cd)> tail_bound;
    DomainSpec domain;
    AsymptoticSpec spec;
    CMap map;
    double tol = 0;
    CMapHP evaluator_hp;  // set when an extended-precision map was supplied
};

// alpha^-N f^N(z) with certified tails; escaping iterates raise invariance_violation
KoenigsResult koenigs_normalize(const CMap& f, const AsymptoticSpec& s, const DomainSpec& dom, double R, double tol,
                                const CMapHP& f_hp = nullptr, double tol_hp = 1e-80);

std::vector<KoenigsSample> evaluate_grid(const KoenigsResult& k, const std::vector<cd>& pts, bool parallel = true);
void write_samples_csv(std::ostream& os, const std::vector<KoenigsSample>& v);
std::string samples_to_json(const std::vector<KoenigsSample>& v);

struct HomologicalSolution {
    CMap evaluator;
    std::function<double(cd)> tail_bound;
    double nu = 0;
    double R = 0;
};
// phi_g = -sum alpha^-(n+1) g o f^n, solving phi_g o f - alpha phi_g = g
HomologicalSolution solve_homological(const CMap& f, const CMap& g, double nu, const AsymptoticSpec& s,
                                      const DomainSpec& dom, double R, double tol, const GridSpec& grid = {});

struct HomologicalSample {
    cd zeta, value;
    double residual = 0;  // |phi_g(f z) - alpha phi_g(z) - g(z)|
    double scaled = 0;    // |phi_g(z)| e^{nu Re z}
};
std::vector<HomologicalSample> check_homological(const HomologicalSolution& h, const CMap& f, const CMap& g,
                                                 double alpha, const std::vector<cd>& pts, bool parallel = true);

struct RealLineReport {
    bool applicable = false;  // f maps the sampled reals to reals
    bool passed = false;
    double max_im = 0;
};
RealLineReport real_line_invariance_check(const KoenigsResult& k, const std::vector<double>& samples,
                                          double tol = 1e-12);

} // namespace lts

#endif
