#ifndef PGRID_UTIL_PARALLEL_H_
#define PGRID_UTIL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace pgrid::util {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index runs exactly
// once; callers write results into per-index slots and reduce them in index
// order, so output never depends on `jobs`. If tasks throw, one of the
// exceptions is rethrown after all threads finish.
void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)>& fn);

// Hardware concurrency, at least 1.
int DefaultJobs();

}  // namespace pgrid::util

#endif  // PGRID_UTIL_PARALLEL_H_
