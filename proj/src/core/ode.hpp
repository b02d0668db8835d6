#pragma once

#include <functional>

#include "core/vec.hpp"

namespace slg {

using OdeRhs = std::function<void(double t, Span y, std::span<double> dy)>;
// Called after every accepted step; may veto continuation by returning false.
using OdeObserver = std::function<bool(double t, Span y)>;

struct OdeResult {
    Vec y;
    bool ok = false;
    long long accepted = 0;
    long long rejected = 0;
    std::string message;
};

// Dormand-Prince 5(4) with standard step control.
OdeResult rk45(const OdeRhs& f, double t0, double t1, Span y0, double rel_tol = 1e-10,
               double abs_tol = 1e-12, const OdeObserver& observer = {},
               long long max_steps = 2'000'000);

}  // namespace slg
