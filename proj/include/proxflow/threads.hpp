#pragma once

namespace proxflow {

/// Number of threads the parallel kernels may use. Defaults to 1; the
/// PROXFLOW_THREADS environment variable raises it, set_max_threads()
/// overrides both. Per-element results do not depend on this value
/// (reductions are always carried out serially in a fixed order).
int max_threads();

void set_max_threads(int n);

}  // namespace proxflow
