#ifndef LTS_PARALLEL_HPP
#define LTS_PARALLEL_HPP

#include <exception>
#include <string>

#include "lts/errors.hpp"

namespace lts {

// OpenMP loop that carries the first exception out of the parallel region
template <class Body>
void guarded_for(int n, bool parallel, Body body) {
    std::string msg;
    ErrorKind kind = ErrorKind::internal;
    bool failed = false;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (const Error& e) {
#pragma omp critical(lts_guarded_for)
            if (!failed) { failed = true; kind = e.kind(); msg = e.what(); }
        } catch (const std::exception& e) {
#pragma omp critical(lts_guarded_for)
            if (!failed) { failed = true; msg = e.what(); }
        }
    }
    if (failed) fail(kind, msg);
}

} // namespace lts

#endif
