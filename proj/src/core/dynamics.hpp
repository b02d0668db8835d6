#pragma once

#include <functional>
#include <optional>
#include <string>

#include "core/lyapunov.hpp"
#include "core/potential.hpp"
#include "core/rng.hpp"
#include "core/vec.hpp"

namespace slg {

enum class Scheme { EulerMaruyama, SplitOU };

struct SdeConfig {
    double gamma = 1.0;
    double temperature = 1.0;  // >= 0; zero is the deterministic test hook
    double dt = 1e-3;
    long long n_steps = 1000;
    Scheme scheme = Scheme::SplitOU;
    std::uint64_t seed = 0;
    long long sample_every = 1;
    double energy_jump_cap = 1e3;  // reject a step gaining more than this
    int max_dt_shrink = 12;

    void validate() const;
};

struct StepStats {
    long long shrink_events = 0;
    int deepest_level = 0;
};

// One step of size sde.dt.  A rejected substep (domain exit or an energy
// jump above the cap) is replaced by two half steps, recursively, down to
// max_dt_shrink levels; the full dt of simulated time is always advanced.
// Throws StepError when the shrink budget is exhausted.
PhaseState step(const PotentialModel& model, const SdeConfig& sde, const PhaseState& x,
                CounterRng& rng, StepStats* stats = nullptr);

struct Observable {
    std::string name;
    std::function<double(const PotentialModel&, const PhaseState&)> fn;
};

struct TrajectorySummary {
    Vec times;
    std::vector<std::string> columns;  // H, U, p2 [, logW] [, extras...]
    Mat records;                       // one row per sample time
    bool exit_flag = false;            // numerical failure, not dynamics
    long long fail_step = -1;
    std::string fail_message;
    PhaseState final_state;
    StepStats stats;
    long long steps_done = 0;
    int replica = 0;
};

// Runs n_steps from x0, recording every sample_every steps (including the
// initial state).  Deterministic given (seed, replica).
TrajectorySummary simulate(const PotentialModel& model, const SdeConfig& sde,
                           const PhaseState& x0, const std::vector<Observable>& extras = {},
                           const LyapunovParams* log_w_params = nullptr, int replica = 0);

// Independent replicas; per-replica streams are derived from (seed, replica)
// so results do not depend on thread count or scheduling.
std::vector<TrajectorySummary> ensemble(const PotentialModel& model, const SdeConfig& sde,
                                        const std::vector<PhaseState>& x0s, int replicas,
                                        const std::vector<Observable>& extras = {},
                                        const LyapunovParams* log_w_params = nullptr);

}  // namespace slg
