#include "core/dynamics.hpp"

#include <cmath>

#include "core/threads.hpp"

namespace slg {

void SdeConfig::validate() const {
    if (gamma <= 0.0) throw ConfigError("sde.gamma must be > 0");
    if (temperature < 0.0) throw ConfigError("sde.temperature must be >= 0");
    if (dt <= 0.0) throw ConfigError("sde.dt must be > 0");
    if (n_steps < 1) throw ConfigError("sde.n_steps must be >= 1");
    if (sample_every < 1) throw ConfigError("sde.sample_every must be >= 1");
    if (energy_jump_cap <= 0.0) throw ConfigError("sde.energy_jump_cap must be > 0");
    if (max_dt_shrink < 0) throw ConfigError("sde.max_dt_shrink must be >= 0");
}

namespace {

struct Attempt {
    PhaseState x;
    bool ok = false;
};

Attempt try_em(const PotentialModel& model, const SdeConfig& sde, const PhaseState& x, double h,
               CounterRng& rng, double u0) {
    const int dim = model.dim();
    Attempt out;
    Vec g = model.gradient(x.q);
    out.x.q.resize(dim);
    out.x.p.resize(dim);
    const double noise = std::sqrt(2.0 * sde.gamma * sde.temperature * h);
    for (int i = 0; i < dim; ++i) {
        out.x.q[i] = x.q[i] + h * x.p[i];
        out.x.p[i] = x.p[i] - h * (sde.gamma * x.p[i] + g[i]) + noise * rng.normal();
    }
    if (!model.is_in_domain(out.x.q)) return out;
    const double u1 = model.value(out.x.q);
    out.ok = std::isfinite(u1) && u1 <= u0 + sde.energy_jump_cap;
    return out;
}

Attempt try_baoab(const PotentialModel& model, const SdeConfig& sde, const PhaseState& x,
                  double h, CounterRng& rng, double u0) {
    const int dim = model.dim();
    Attempt out;
    Vec g = model.gradient(x.q);
    Vec p1(dim), q1(dim);
    for (int i = 0; i < dim; ++i) {
        p1[i] = x.p[i] - 0.5 * h * g[i];
        q1[i] = x.q[i] + 0.5 * h * p1[i];
    }
    // the half-drift must not tunnel through the singular wall
    if (!model.is_in_domain(q1) || !std::isfinite(model.value(q1))) return out;
    const double decay = std::exp(-sde.gamma * h);
    const double noise = std::sqrt(sde.temperature * (1.0 - decay * decay));
    for (int i = 0; i < dim; ++i) p1[i] = decay * p1[i] + noise * rng.normal();
    out.x.q.resize(dim);
    out.x.p.resize(dim);
    for (int i = 0; i < dim; ++i) out.x.q[i] = q1[i] + 0.5 * h * p1[i];
    if (!model.is_in_domain(out.x.q)) return out;
    const double u1 = model.value(out.x.q);
    if (!std::isfinite(u1) || u1 > u0 + sde.energy_jump_cap) return out;
    Vec g1 = model.gradient(out.x.q);
    for (int i = 0; i < dim; ++i) out.x.p[i] = p1[i] - 0.5 * h * g1[i];
    out.ok = true;
    return out;
}

std::string describe_state(const PhaseState& x) {
    std::string out = "q=(";
    const std::size_t show = std::min<std::size_t>(x.q.size(), 6);
    for (std::size_t i = 0; i < show; ++i)
        out += (i ? "," : "") + std::to_string(x.q[i]);
    if (show < x.q.size()) out += ",...";
    out += ") p=(";
    for (std::size_t i = 0; i < show; ++i)
        out += (i ? "," : "") + std::to_string(x.p[i]);
    if (show < x.p.size()) out += ",...";
    return out + ")";
}

PhaseState step_recursive(const PotentialModel& model, const SdeConfig& sde, const PhaseState& x,
                          double h, int level, CounterRng& rng, StepStats* stats) {
    const double u0 = model.value(x.q);
    if (!std::isfinite(u0)) throw StepError("step: state left the domain at " + describe_state(x));
    Attempt att = sde.scheme == Scheme::EulerMaruyama ? try_em(model, sde, x, h, rng, u0)
                                                      : try_baoab(model, sde, x, h, rng, u0);
    if (att.ok) return std::move(att.x);
    if (level >= sde.max_dt_shrink)
        throw StepError("step: shrink budget exhausted at " + describe_state(x));
    if (stats) {
        ++stats->shrink_events;
        stats->deepest_level = std::max(stats->deepest_level, level + 1);
    }
    PhaseState half = step_recursive(model, sde, x, 0.5 * h, level + 1, rng, stats);
    return step_recursive(model, sde, half, 0.5 * h, level + 1, rng, stats);
}

}  // namespace

PhaseState step(const PotentialModel& model, const SdeConfig& sde, const PhaseState& x,
                CounterRng& rng, StepStats* stats) {
    sde.validate();
    if (!model.is_in_domain(x.q)) throw DomainError("step: initial state outside X");
    return step_recursive(model, sde, x, sde.dt, 0, rng, stats);
}

TrajectorySummary simulate(const PotentialModel& model, const SdeConfig& sde,
                           const PhaseState& x0, const std::vector<Observable>& extras,
                           const LyapunovParams* log_w_params, int replica) {
    sde.validate();
    if (!model.is_in_domain(x0.q)) throw DomainError("simulate: x0 outside X");

    TrajectorySummary out;
    out.replica = replica;
    out.columns = {"H", "U", "p2"};
    if (log_w_params) out.columns.push_back("logW");
    for (const auto& obs : extras) out.columns.push_back(obs.name);

    const long long n_records = sde.n_steps / sde.sample_every + 1;
    const int n_cols = static_cast<int>(out.columns.size());
    out.records = Mat(static_cast<int>(n_records), n_cols);
    out.times.reserve(n_records);

    CounterRng rng(sde.seed, static_cast<std::uint64_t>(replica));

    PhaseState x = x0;
    long long row = 0;
    auto record = [&](long long step_idx) {
        const double u = model.value(x.q);
        const double p2 = nrm2_sq(x.p);
        int c = 0;
        out.records(static_cast<int>(row), c++) = 0.5 * p2 + u;
        out.records(static_cast<int>(row), c++) = u;
        out.records(static_cast<int>(row), c++) = p2;
        if (log_w_params)
            out.records(static_cast<int>(row), c++) = eval_log_w(*log_w_params, model, x.q, x.p);
        for (const auto& obs : extras) out.records(static_cast<int>(row), c++) = obs.fn(model, x);
        out.times.push_back(static_cast<double>(step_idx) * sde.dt);
        ++row;
    };

    record(0);
    for (long long k = 1; k <= sde.n_steps; ++k) {
        try {
            x = step_recursive(model, sde, x, sde.dt, 0, rng, &out.stats);
        } catch (const StepError& err) {
            out.exit_flag = true;
            out.fail_step = k;
            out.fail_message = err.what();
            break;
        }
        out.steps_done = k;
        if (k % sde.sample_every == 0) record(k);
    }
    out.final_state = x;
    return out;
}

std::vector<TrajectorySummary> ensemble(const PotentialModel& model, const SdeConfig& sde,
                                        const std::vector<PhaseState>& x0s, int replicas,
                                        const std::vector<Observable>& extras,
                                        const LyapunovParams* log_w_params) {
    if (x0s.empty()) throw ConfigError("ensemble: at least one initial state required");
    std::vector<TrajectorySummary> out(replicas);
    parallel_for(replicas, [&](long long r) {
        const PhaseState& x0 = x0s[static_cast<std::size_t>(r) % x0s.size()];
        out[r] = simulate(model, sde, x0, extras, log_w_params, static_cast<int>(r));
    });
    return out;
}

}  // namespace slg
