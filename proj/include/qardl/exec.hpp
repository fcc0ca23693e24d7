#pragma once

#include <cstddef>

#include <functional>

namespace qardl {

// Scheduling policy for embarrassingly parallel loops (quantile grids,
// bootstrap replications, simulation replications). Results must be bitwise
// identical under either policy: bodies write to pre-allocated slots and all
// reductions happen serially afterwards.
enum class Execution { serial, parallel };

// Runs body(0..n-1). Under Execution::parallel iterations are distributed
// across OpenMP threads when available. Exceptions thrown by the body are
// captured and the one from the smallest index is rethrown after the loop,
// so failure behavior does not depend on scheduling.
void parallel_for(std::size_t n, Execution exec,
                  const std::function<void(std::size_t)>& body);

}  // namespace qardl
