#ifndef LTS_PARSE_HPP
#define LTS_PARSE_HPP

#include <string>

#include "lts/series.hpp"

namespace lts {

// Recursive descent over
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := base ('^' exponent)?
//   base   := number | 'i' | 'z' | 'l'INT | 'log' '(' expr ')' | 'exp' '(' expr ')' | '(' expr ')'
// Numbers are INT, INT/INT via division, or decimals (which switch the
// result to float mode). A number immediately followed by 'i' is imaginary.
TransSeries parse_series(const std::string& text, const TruncationGrid& grid, Mode mode = Mode::exact);

} // namespace lts

#endif
