#ifndef LTS_MAP_EXPR_HPP
#define LTS_MAP_EXPR_HPP

#include <memory>
#include <string>

#include "lts/analytic.hpp"

namespace lts {

// Complex map of one variable (zeta, or z as an alias) for the analytic commands:
//   expr := term (('+'|'-') term)*     term := unary (('*'|'/') unary)*
//   unary := '-' unary | power         power := primary ('^' unary)?
//   primary := number['i'] | 'i' | 'zeta' | 'z' | fn '(' expr ')' | '(' expr ')'
//   fn := exp | log | sqrt | sin | cos
class MapExpr {
public:
    struct Node;
    static MapExpr parse(const std::string& text);
    cd operator()(cd z) const;
    cx_hp operator()(const cx_hp& z) const;
    CMap as_map() const;
    CMapHP as_map_hp() const;
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace lts

#endif
