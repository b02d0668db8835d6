#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: a forced-noise integrator step and the semigroup finite-difference
// estimate of L W / W.

#include <cmath>

#include "core/lyapunov.hpp"
#include "core/potential.hpp"
#include "core/rng.hpp"
#include "core/threads.hpp"
#include "core/vec.hpp"

namespace slg::testing {

inline PhaseState forced_baoab_step(const PotentialModel& m, double gamma, double T, double h,
                                    const PhaseState& x, const Vec& xi, double sign) {
    const int dim = m.dim();
    Vec g = m.gradient(x.q);
    PhaseState y;
    y.q.resize(dim);
    y.p.resize(dim);
    Vec p1(dim), q1(dim);
    for (int i = 0; i < dim; ++i) {
        p1[i] = x.p[i] - 0.5 * h * g[i];
        q1[i] = x.q[i] + 0.5 * h * p1[i];
    }
    const double decay = std::exp(-gamma * h);
    const double noise = std::sqrt(T * (1.0 - decay * decay));
    for (int i = 0; i < dim; ++i) p1[i] = decay * p1[i] + noise * sign * xi[i];
    for (int i = 0; i < dim; ++i) y.q[i] = q1[i] + 0.5 * h * p1[i];
    Vec g1 = m.gradient(y.q);
    for (int i = 0; i < dim; ++i) y.p[i] = p1[i] - 0.5 * h * g1[i];
    return y;
}

// (E W(x_h) - W(x)) / (h W(x)) with antithetic noise pairs; chunked so the
// reduction order is fixed for any thread count.
inline double semigroup_ratio_fd(const PotentialModel& m, const LyapunovParams& params,
                                 const PhaseState& x, double h, long long n_pairs,
                                 std::uint64_t seed) {
    const double log_w0 = eval_log_w(params, m, x.q, x.p);
    const int dim = m.dim();
    const int chunks = 64;
    const long long per_chunk = (n_pairs + chunks - 1) / chunks;
    Vec partial(chunks, 0.0);
    parallel_for(chunks, [&](long long c) {
        double acc = 0.0;
        Vec xi(dim);
        const long long lo = c * per_chunk;
        const long long hi = std::min<long long>(n_pairs, lo + per_chunk);
        for (long long i = lo; i < hi; ++i) {
            CounterRng rng(seed, 0xFD0000ULL + static_cast<std::uint64_t>(i));
            rng.fill_normal(xi.data(), dim);
            for (double sign : {1.0, -1.0}) {
                const PhaseState y =
                    forced_baoab_step(m, params.gamma, params.temperature, h, x, xi, sign);
                acc += std::expm1(eval_log_w(params, m, y.q, y.p) - log_w0);
            }
        }
        partial[static_cast<std::size_t>(c)] = acc;
    });
    double total = 0.0;
    for (double v : partial) total += v;
    return total / (2.0 * static_cast<double>(n_pairs) * h);
}

}  // namespace slg::testing
