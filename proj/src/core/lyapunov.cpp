#include "core/lyapunov.hpp"

#include <algorithm>
#include <cmath>

namespace slg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogDblMax = 709.782712893384;

// Everything the closed-form ratio needs at one state.
struct GBundle {
    double u = 0.0;
    bool active = false;  // cutoff or its slope nonzero (U > r1)
    double a = 0.0, ap = 0.0;
    double s = 0.0;  // |grad U|^2
    Vec grad;
    Vec hess_p;  // H p
    Vec hess_g;  // H grad
};

GBundle g_bundle(const LyapunovParams& params, const PotentialModel& model, Span q, Span p,
                 bool need_hessian) {
    GBundle gb;
    gb.u = model.value(q);
    if (!std::isfinite(gb.u)) throw DomainError("state is outside X");
    if (gb.u <= params.r1) return gb;

    gb.active = true;
    const Cutoff cut = params.cutoff();
    gb.a = cut.value(gb.u);
    gb.ap = cut.deriv(gb.u);
    gb.grad = model.gradient(q);
    gb.s = nrm2_sq(gb.grad);
    if (gb.s < 1e-28)
        throw ConsistencyError("|grad U| vanishes in the cutoff's active region; r1 is too small");
    if (need_hessian) {
        Mat h(model.dim());
        model.hessian(q, h);
        gb.hess_p.resize(model.dim());
        gb.hess_g.resize(model.dim());
        h.matvec(p, gb.hess_p);
        h.matvec(gb.grad, gb.hess_g);
    }
    return gb;
}

}  // namespace

double hamiltonian(const PotentialModel& model, Span q, Span p) {
    const double u = model.value(q);
    if (!std::isfinite(u)) throw DomainError("hamiltonian: q is outside O");
    return 0.5 * nrm2_sq(p) + u;
}

double eval_psi(const LyapunovParams& params, const PotentialModel& model, Span q, Span p) {
    const GBundle gb = g_bundle(params, model, q, p, false);
    if (!gb.active || gb.a == 0.0) return 0.0;
    return params.kappa * gb.a * dot(p, gb.grad) / gb.s;
}

double eval_log_w(const LyapunovParams& params, const PotentialModel& model, Span q, Span p) {
    const double u = model.value(q);
    if (!std::isfinite(u)) throw DomainError("state is outside X");
    return params.b * (0.5 * nrm2_sq(p) + u) + eval_psi(params, model, q, p);
}

double eval_w(const LyapunovParams& params, const PotentialModel& model, Span q, Span p,
              bool* overflow) {
    const double lw = eval_log_w(params, model, q, p);
    if (overflow) *overflow = lw > kLogDblMax;
    return lw > kLogDblMax ? kInf : std::exp(lw);
}

double generator_ratio(const LyapunovParams& params, const PotentialModel& model, Span q,
                       Span p) {
    const double b = params.b, g = params.gamma, T = params.temperature;
    const double nd = static_cast<double>(params.n) * params.d;
    double ratio = -b * g * (1.0 - b * T) * nrm2_sq(p) + g * b * T * nd;

    const GBundle gb = g_bundle(params, model, q, p, true);
    if (!gb.active) return ratio;

    const double k = params.kappa;
    const double pg = dot(p, gb.grad);
    const double php = dot(p, gb.hess_p);
    const double phg = dot(gb.grad, gb.hess_p);  // p^T H g, H symmetric
    const double psi = k * gb.a * pg / gb.s;

    const double p_grad_psi =
        k * gb.ap * pg * pg / gb.s + k * gb.a * (php / gb.s - 2.0 * pg * phg / (gb.s * gb.s));

    ratio += -k * gb.a + p_grad_psi + (2.0 * b * T - 1.0) * g * psi +
             k * k * g * T * gb.a * gb.a / gb.s;
    return ratio;
}

SplitGenerator apply_split_generator(const PotentialModel& model, double gamma,
                                     double temperature, const FieldDerivatives& f, Span q,
                                     Span p) {
    const Vec grad_u = model.gradient(q);
    SplitGenerator sg;
    sg.a_part = -dot(grad_u, f.grad_p);
    sg.h_part = dot(p, f.grad_q) + sg.a_part;
    sg.r_part = -dot(p, f.grad_p) + temperature * f.lap_p;
    sg.total = sg.h_part + gamma * sg.r_part;
    return sg;
}

FieldDerivatives hamiltonian_derivatives(const PotentialModel& model, Span q, Span p) {
    FieldDerivatives f;
    f.value = hamiltonian(model, q, p);
    f.grad_q = model.gradient(q);
    f.grad_p.assign(p.begin(), p.end());
    f.lap_p = static_cast<double>(model.dim());
    return f;
}

FieldDerivatives psi_derivatives(const LyapunovParams& params, const PotentialModel& model,
                                 Span q, Span p) {
    FieldDerivatives f;
    f.grad_q.assign(model.dim(), 0.0);
    f.grad_p.assign(model.dim(), 0.0);
    f.lap_p = 0.0;

    const GBundle gb = g_bundle(params, model, q, p, true);
    if (!gb.active) return f;

    const double k = params.kappa;
    const double pg = dot(p, gb.grad);
    f.value = k * gb.a * pg / gb.s;
    // grad_q psi = kappa alpha'(U) (p.G) grad U + kappa alpha(U) J_G^T p,
    // J_G^T p = H p / S - 2 (p.grad U) H grad U / S^2
    for (int i = 0; i < model.dim(); ++i) {
        f.grad_q[i] = k * gb.ap * (pg / gb.s) * gb.grad[i] +
                      k * gb.a * (gb.hess_p[i] / gb.s -
                                  2.0 * pg * gb.hess_g[i] / (gb.s * gb.s));
        f.grad_p[i] = k * gb.a * gb.grad[i] / gb.s;
    }
    return f;
}

double generator_ratio_via_split(const LyapunovParams& params, const PotentialModel& model,
                                 Span q, Span p) {
    // L e^V / e^V = L V + gamma T |grad_p V|^2 with V = b H + psi, assembled
    // by linearity of L over the two pieces.  Summing the gradients first
    // would let the huge b p.grad U transport terms (which cancel inside
    // L H) absorb psi's small derivatives.
    const auto fh = hamiltonian_derivatives(model, q, p);
    const auto fpsi = psi_derivatives(params, model, q, p);
    const SplitGenerator sh = apply_split_generator(model, params.gamma, params.temperature, fh,
                                                    q, p);
    const SplitGenerator sp = apply_split_generator(model, params.gamma, params.temperature,
                                                    fpsi, q, p);
    Vec grad_p_v(model.dim());
    for (int i = 0; i < model.dim(); ++i) grad_p_v[i] = params.b * p[i] + fpsi.grad_p[i];
    return params.b * sh.total + sp.total +
           params.gamma * params.temperature * nrm2_sq(grad_p_v);
}

// ---------------------------------------------------------------------
// Parameter selection

namespace {

struct ConditionCheck {
    bool ok = true;
    std::string failing;
    double worst = 0.0;
};

ConditionCheck check_region_conditions(const PotentialModel& model, const LyapunovParams& params,
                                       double u_lo, double u_span_decades, long long samples,
                                       std::uint64_t seed) {
    const double bound_grad_g = params.drift_coeff() / (8.0 * params.kappa);
    const double abs2bt = std::abs(2.0 * params.b * params.temperature - 1.0);
    const double g2_coeff = 0.5 * params.kappa * params.C * abs2bt * params.gamma +
                            params.kappa * params.kappa * params.gamma * params.temperature;
    const double g2_bound = params.gamma * params.b * params.temperature *
                            static_cast<double>(params.n) * params.d / g2_coeff;

    const int dim = model.dim();
    Mat h(dim), jg(dim);
    ConditionCheck out;
    for (long long i = 0; i < samples; ++i) {
        CounterRng rng(seed, 0x5E1E0000ULL + static_cast<std::uint64_t>(i));
        const double u = u_lo * std::pow(10.0, u_span_decades * rng.uniform());
        const EscapeRoute route = (model.has_collapse_route() && (i % 2 == 1))
                                      ? EscapeRoute::Collapse
                                      : EscapeRoute::Outward;
        Vec q;
        try {
            q = model.escape_config(route, u, rng);
        } catch (const SamplingError&) {
            continue;
        }
        const Vec g = model.gradient(q);
        const double s = nrm2_sq(g);
        const double gn = std::sqrt(s);
        if (gn < 1.0) {
            out.ok = false;
            out.failing = "|grad U| >= 1 on {U >= r1/2}";
            out.worst = gn;
            return out;
        }
        if (1.0 / s > g2_bound) {
            out.ok = false;
            out.failing = "(kappa C/2 |2bT-1| gamma + kappa^2 gamma T) |G|^2 <= gamma b T N d";
            out.worst = 1.0 / s;
            return out;
        }
        model.hessian(q, h);
        Vec hg(dim);
        h.matvec(g, hg);
        for (int a = 0; a < dim; ++a)
            for (int c = 0; c < dim; ++c)
                jg(a, c) = h(a, c) / s - 2.0 * g[a] * hg[c] / (s * s);
        const double grad_g = jg.frobenius();
        if (grad_g >= bound_grad_g) {
            out.ok = false;
            out.failing = "|grad G| < b gamma (1-bT) / (8 kappa) on {U >= r1/2}";
            out.worst = grad_g;
            return out;
        }
    }
    return out;
}

}  // namespace

LyapunovParams select_params(const PotentialModel& model, double gamma, double temperature,
                             double b, const SelectOptions& opts) {
    if (gamma <= 0.0 || temperature <= 0.0)
        throw ConfigError("select_params: gamma and temperature must be > 0");
    if (!(b > 0.0) || !(b * temperature < 1.0))
        throw ConfigError("select_params: b must lie in (0, 1/T)");

    LyapunovParams params;
    params.b = b;
    params.gamma = gamma;
    params.temperature = temperature;
    params.n = model.particles();
    params.d = model.space_dim();

    const double nd = static_cast<double>(params.n) * params.d;
    params.kappa = 3.0 * gamma * nd * (1.0 + opts.kappa_slack);
    const double c_rhs =
        4.0 * std::abs(2.0 * b * temperature - 1.0) * params.kappa / (b * (1.0 - b * temperature));
    params.C = std::max(c_rhs, 1.0) * (1.0 + 1e-3);

    double r1 = std::max(opts.r1_initial, 1e-6);
    ConditionCheck last;
    // conditions are per-sample cheap; spend fewer samples while doubling,
    // then confirm the final r1 with the full budget
    const long long probe_samples = std::max<long long>(2000, opts.samples / 16);
    while (r1 <= opts.r1_max) {
        params.r1 = r1;
        last = check_region_conditions(model, params, 0.5 * r1, opts.u_probe_decades,
                                       probe_samples, opts.seed);
        if (last.ok) break;
        r1 *= 2.0;
    }
    if (!last.ok)
        throw SelectionError("select_params: r1 exceeded " + std::to_string(opts.r1_max) +
                             " without satisfying: " + last.failing);
    params.r1 = r1;
    params.r2 = 2.0 * r1 + 16.0 * params.kappa / params.drift_coeff();

    last = check_region_conditions(model, params, 0.5 * r1, opts.u_probe_decades, opts.samples,
                                   opts.seed + 1);
    if (!last.ok)
        throw SelectionError("select_params: confirmation sample failed: " + last.failing);

    // quintic slope bound 15/(8 dR) must not exceed the proof's requirement
    if (params.cutoff().deriv_bound() > params.drift_coeff() / (8.0 * params.kappa))
        throw SelectionError("select_params: cutoff slope bound violated (internal)");
    return params;
}

// ---------------------------------------------------------------------
// Drift verification

PhaseState sample_stratified(const LyapunovParams& params, const PotentialModel& model,
                             Stratum stratum, CounterRng& rng) {
    const int dim = model.dim();
    const double pcap = params.p2_cap();
    PhaseState x;

    const double u_floor = 1.05 * model.value(model.anchor()) + 1e-6;
    auto q_bulk = [&]() {
        if (rng.uniform() < 0.5) {
            try {
                return model.sample_sublevel(0.999 * params.r2, rng);
            } catch (const SamplingError&) {
            }
        }
        const double u = params.r2 * std::pow(rng.uniform(), 0.5);
        const EscapeRoute route = (model.has_collapse_route() && rng.uniform() < 0.5)
                                      ? EscapeRoute::Collapse
                                      : EscapeRoute::Outward;
        return model.escape_config(route, std::max(u, u_floor), rng);
    };
    auto q_high = [&](double decades) {
        const double u = params.r2 * std::pow(10.0, decades * rng.uniform());
        const EscapeRoute route = (model.has_collapse_route() && rng.uniform() < 0.5)
                                      ? EscapeRoute::Collapse
                                      : EscapeRoute::Outward;
        return model.escape_config(route, u, rng);
    };
    auto momentum = [&](double p2_lo, double p2_hi) {
        Vec p(dim);
        rng.fill_normal(p.data(), dim);
        const double norm = nrm2(p);
        const double target = std::sqrt(p2_lo + (p2_hi - p2_lo) * rng.uniform());
        if (norm > 0.0)
            for (double& v : p) v *= target / norm;
        return p;
    };

    switch (stratum) {
        case Stratum::CompactLowP:
            x.q = q_bulk();
            x.p = momentum(0.0, pcap);
            break;
        case Stratum::LargeP:
            x.q = q_bulk();
            x.p = momentum(pcap * 1.0001, 9.0 * pcap);
            break;
        case Stratum::HighU:
            x.q = q_high(3.0);
            x.p = momentum(0.0, pcap);
            break;
        case Stratum::Escape:
            x.q = q_high(6.0);
            x.p = momentum(0.0, 9.0 * pcap);
            break;
    }
    return x;
}

DriftReport verify_drift(const LyapunovParams& params, const PotentialModel& model,
                         const DriftOptions& opts) {
    DriftReport rep;
    rep.samples = opts.n_samples;
    rep.p2_cap = params.p2_cap();
    const double nd = static_cast<double>(params.n) * params.d;
    const double pcap = params.p2_cap();

    struct Sample {
        PhaseState x;
        double ratio, log_w, u;
        bool far;
    };

    auto draw = [&](std::uint64_t salt, long long i) {
        CounterRng rng(opts.seed, salt + static_cast<std::uint64_t>(i));
        const Stratum st = static_cast<Stratum>(i % 4);
        Sample s;
        s.x = sample_stratified(params, model, st, rng);
        s.ratio = generator_ratio(params, model, s.x.q, s.x.p);
        s.log_w = eval_log_w(params, model, s.x.q, s.x.p);
        s.u = model.value(s.x.q);
        s.far = (s.u >= params.r2) || (nrm2_sq(s.x.p) > pcap);
        return s;
    };

    // estimation pass
    double max_far = -kInf;
    std::vector<Sample> compact;
    for (long long i = 0; i < opts.n_samples; ++i) {
        Sample s = draw(0xE5710000ULL, i);
        if (s.far)
            max_far = std::max(max_far, s.ratio);
        else
            compact.push_back(std::move(s));
    }
    rep.max_far_ratio = max_far;
    rep.c_hat = 0.9 * std::min(params.gamma * nd / 2.0, -max_far);
    if (!(rep.c_hat > 0.0)) {
        rep.pass = false;
        rep.violations = -1;
        return rep;
    }

    auto log_excess = [&](double ratio, double log_w) -> double {
        const double rc = ratio + rep.c_hat;
        return rc > 0.0 ? std::log(rc) + log_w : -kInf;
    };

    // K from the sampled compact region, then sharpened by local ascent so
    // the fresh pass cannot land above it by sampling luck
    std::sort(compact.begin(), compact.end(), [&](const Sample& a, const Sample& b) {
        return log_excess(a.ratio, a.log_w) > log_excess(b.ratio, b.log_w);
    });
    double log_k = compact.empty() ? -kInf : log_excess(compact[0].ratio, compact[0].log_w);

    const int dim = model.dim();
    auto objective = [&](const PhaseState& s) -> double {
        if (!model.is_in_domain(s.q)) return -kInf;
        const double u = model.value(s.q);
        if (!std::isfinite(u) || u > params.r2) return -kInf;
        if (nrm2_sq(s.p) > pcap) return -kInf;
        return log_excess(generator_ratio(params, model, s.q, s.p),
                          eval_log_w(params, model, s.q, s.p));
    };
    const int n_starts = std::min<int>(opts.refine_starts, static_cast<int>(compact.size()));
    for (int s0 = 0; s0 < n_starts; ++s0) {
        PhaseState x = compact[s0].x;
        double best = objective(x);
        Vec steps(2 * dim);
        for (int i = 0; i < dim; ++i) {
            steps[i] = 0.1 * (1.0 + std::abs(x.q[i]));
            steps[dim + i] = 0.1 * (1.0 + std::abs(x.p[i]));
        }
        int evals = 0;
        while (evals < opts.refine_iters) {
            bool improved = false;
            for (int i = 0; i < 2 * dim && evals < opts.refine_iters; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    PhaseState y = x;
                    if (i < dim)
                        y.q[i] += sgn * steps[i];
                    else
                        y.p[i - dim] += sgn * steps[i];
                    const double v = objective(y);
                    ++evals;
                    if (v > best) {
                        best = v;
                        x = y;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) {
                double max_step = 0.0;
                for (double& st : steps) {
                    st *= 0.5;
                    max_step = std::max(max_step, st);
                }
                if (max_step < 1e-10) break;
            }
        }
        log_k = std::max(log_k, best);
    }
    rep.log_k_hat = log_k;

    // fresh recount
    auto hist_slot = [&](double margin) {
        const double l = std::log10(std::max(margin, 1e-300));
        int idx = static_cast<int>(std::floor((l + 6.0) * 2.0));
        return std::clamp(idx, 0, DriftReport::kBins - 1);
    };
    for (long long i = 0; i < opts.n_samples; ++i) {
        Sample s = draw(0xF4E50000ULL, i);
        const double lhs = log_excess(s.ratio, s.log_w);
        if (lhs == -kInf) {
            ++rep.margin_hist[DriftReport::kBins - 1];
            continue;
        }
        const double margin = rep.log_k_hat - lhs;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < 0.0) {
            ++rep.violations;
            if (rep.witnesses.size() < 32)
                rep.witnesses.push_back({s.x.q, s.x.p, s.ratio, s.log_w});
        } else {
            ++rep.margin_hist[hist_slot(margin)];
        }
    }
    rep.pass = rep.violations == 0;
    return rep;
}

}  // namespace slg
