#ifndef LTS_COMPOSE_HPP
#define LTS_COMPOSE_HPP

#include <utility>

#include "lts/series.hpp"

namespace lts {

enum class ShapeClass { parabolic, hyperbolic, strongly_hyperbolic };

struct HyperbolicShape {
    Coeff lambda;
    Q alpha;
    ShapeClass cls;
};

// leading term lambda*z^alpha with alpha > 0 and no logarithms; shape error otherwise
HyperbolicShape shape_of(const TransSeries& f);
const char* shape_name(ShapeClass c);

TransSeries compose_power(const Q& beta, const TransSeries& f);
// log f with log z written as -l1^-1
TransSeries compose_log(const TransSeries& f);
// l_m o f via l_1 o f = -1/log f and l_(m+1) o f = l_1 o (l_m o f)
TransSeries compose_ell(int m, const TransSeries& f);

struct ComposeOptions {
    bool parallel = true;
};
// g o f, monomial by monomial
TransSeries compose(const TransSeries& g, const TransSeries& f, ComposeOptions opt = {});
// single-threaded reference that builds powers of f incrementally
TransSeries compose_serial(const TransSeries& g, const TransSeries& f);

// compositional inverse by Newton refinement
TransSeries invert(const TransSeries& f);
// same inverse by term-at-a-time elimination; slower, kept for cross-checks
TransSeries invert_graded(const TransSeries& f);

// phi o f o phi^-1
TransSeries conjugate(const TransSeries& phi, const TransSeries& f);

// psi = lambda^(1/(alpha-1)) z and psi o f o psi^-1
std::pair<TransSeries, TransSeries> reduce_lambda(const TransSeries& f);
TransSeries reduce_alpha(const TransSeries& f);

} // namespace lts

#endif
