#pragma once

#include <functional>

namespace slg {

// Global cap on worker parallelism (the CLI --threads flag lands here).
// Results never depend on the value; only wall time does.
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, n).  Work is partitioned by index so output
// written to slot i is identical for any thread count.
void parallel_for(long long n, const std::function<void(long long)>& fn);

}  // namespace slg
