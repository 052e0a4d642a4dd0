#ifndef LTS_ERRORS_HPP
#define LTS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lts {

enum class ErrorKind {
    depth_overflow,
    shape,
    mode,
    domain,
    empty_series,
    precondition,
    prenormalization_required,
    out_of_scope,
    certification,
    invariance_violation,
    range,
    parse,
    internal
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

} // namespace lts

#endif
