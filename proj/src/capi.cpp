#include "slangevin.h"

#include <cmath>
#include <cstring>
#include <string>

#include "core/control.hpp"
#include "core/diagnostics.hpp"
#include "core/dynamics.hpp"
#include "core/lyapunov.hpp"
#include "core/potential.hpp"
#include "core/threads.hpp"

namespace {

thread_local std::string g_error;

int classify(const std::exception& e) {
    if (dynamic_cast<const slg::ConfigError*>(&e)) return SLG_ERR_INVALID;
    if (dynamic_cast<const slg::DomainError*>(&e)) return SLG_ERR_DOMAIN;
    if (dynamic_cast<const slg::SamplingError*>(&e) ||
        dynamic_cast<const slg::SelectionError*>(&e) ||
        dynamic_cast<const slg::PathError*>(&e) || dynamic_cast<const slg::StepError*>(&e) ||
        dynamic_cast<const slg::ConsistencyError*>(&e))
        return SLG_ERR_FAIL;
    return SLG_ERR_INTERNAL;
}

template <typename F>
int guard(F&& fn) {
    try {
        fn();
        return SLG_OK;
    } catch (const std::exception& e) {
        g_error = e.what();
        return classify(e);
    } catch (...) {
        g_error = "unknown error";
        return SLG_ERR_INTERNAL;
    }
}

template <typename F>
double guard_value(F&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        g_error = e.what();
        return std::nan("");
    } catch (...) {
        g_error = "unknown error";
        return std::nan("");
    }
}

template <typename T, typename F>
T* guard_new(F&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        g_error = e.what();
        return nullptr;
    } catch (...) {
        g_error = "unknown error";
        return nullptr;
    }
}

slg::SdeConfig to_core(const slg_sde& s) {
    slg::SdeConfig c;
    c.gamma = s.gamma;
    c.temperature = s.temperature;
    c.dt = s.dt;
    c.n_steps = s.n_steps;
    c.scheme = s.scheme == SLG_SCHEME_EULER_MARUYAMA ? slg::Scheme::EulerMaruyama
                                                     : slg::Scheme::SplitOU;
    c.seed = s.seed;
    c.sample_every = s.sample_every;
    c.energy_jump_cap = s.energy_jump_cap;
    c.max_dt_shrink = s.max_dt_shrink;
    return c;
}

slg::Span make_span(const double* p, int len) {
    return slg::Span(p, static_cast<std::size_t>(len));
}

}  // namespace

struct slg_model {
    slg::ModelPtr m;
};
struct slg_lyapunov {
    slg::LyapunovParams p;
};
struct slg_drift_report {
    slg::DriftReport r;
};
struct slg_admissibility {
    slg::AdmissibilityReport r;
};
struct slg_traj {
    slg::TrajectorySummary t;
};
struct slg_gibbs {
    slg::GibbsReference g;
};
struct slg_path {
    slg::ControlPath p;
};

extern "C" {

const char* slg_last_error(void) { return g_error.c_str(); }

void slg_set_max_threads(int n) { slg::set_max_threads(n); }

/* ------------------------------------------------------------------ */

slg_model* slg_model_poly_confine(double A, double alpha, int n, int d) {
    return guard_new<slg_model>(
        [&] { return new slg_model{slg::make_poly_confine(A, alpha, n, d)}; });
}

slg_model* slg_model_singular_pair_1d(double A, double alpha, double B, double beta) {
    return guard_new<slg_model>(
        [&] { return new slg_model{slg::make_singular_pair_1d(A, alpha, B, beta)}; });
}

slg_model* slg_model_interacting(double A, double alpha, double B, double beta, double well_c1,
                                 int n, int d) {
    return guard_new<slg_model>(
        [&] { return new slg_model{slg::make_interacting(A, alpha, B, beta, well_c1, n, d)}; });
}

slg_model* slg_model_composite(const double* conf_A, const double* conf_alpha, int n_conf,
                               const double* pair_B, const double* pair_beta, int n_pair, int n,
                               int d) {
    return guard_new<slg_model>([&] {
        return new slg_model{slg::make_composite(make_span(conf_A, n_conf),
                                                 make_span(conf_alpha, n_conf),
                                                 make_span(pair_B, n_pair),
                                                 make_span(pair_beta, n_pair), n, d)};
    });
}

void slg_model_free(slg_model* m) { delete m; }

int slg_model_dim(const slg_model* m) { return m ? m->m->dim() : -1; }

int slg_model_anchor(const slg_model* m, double* q_out) {
    return guard([&] {
        const slg::Vec a = m->m->anchor();
        std::memcpy(q_out, a.data(), sizeof(double) * a.size());
    });
}

double slg_potential(const slg_model* m, const double* q, int len) {
    return guard_value([&] { return m->m->value(make_span(q, len)); });
}

int slg_gradient(const slg_model* m, const double* q, int len, double* out) {
    return guard([&] {
        m->m->gradient(make_span(q, len), std::span<double>(out, static_cast<std::size_t>(len)));
    });
}

int slg_hessian(const slg_model* m, const double* q, int len, double* out) {
    return guard([&] {
        slg::Mat h(len);
        m->m->hessian(make_span(q, len), h);
        std::memcpy(out, h.data(), sizeof(double) * static_cast<std::size_t>(len) * len);
    });
}

int slg_in_domain(const slg_model* m, const double* q, int len) {
    int result = 0;
    const int rc = guard([&] { result = m->m->is_in_domain(make_span(q, len)) ? 1 : 0; });
    return rc == SLG_OK ? result : -rc;
}

/* ------------------------------------------------------------------ */

void slg_sde_defaults(slg_sde* sde) {
    sde->gamma = 1.0;
    sde->temperature = 1.0;
    sde->dt = 1e-3;
    sde->n_steps = 1000;
    sde->scheme = SLG_SCHEME_SPLIT_OU;
    sde->seed = 0;
    sde->sample_every = 1;
    sde->energy_jump_cap = 1e3;
    sde->max_dt_shrink = 12;
}

namespace {
std::vector<slg::Observable> coord_observables(int record_coords) {
    std::vector<slg::Observable> obs;
    if (record_coords) {
        obs.push_back({"q1", [](const slg::PotentialModel&, const slg::PhaseState& x) {
                           return x.q[0];
                       }});
        obs.push_back({"p1", [](const slg::PotentialModel&, const slg::PhaseState& x) {
                           return x.p[0];
                       }});
    }
    return obs;
}
}  // namespace

slg_traj* slg_simulate(const slg_model* m, const slg_sde* sde, const double* q0,
                       const double* p0, int len, const slg_lyapunov* lw, int replica,
                       int record_coords) {
    return guard_new<slg_traj>([&] {
        slg::PhaseState x0{slg::Vec(q0, q0 + len), slg::Vec(p0, p0 + len)};
        return new slg_traj{slg::simulate(*m->m, to_core(*sde), x0,
                                          coord_observables(record_coords),
                                          lw ? &lw->p : nullptr, replica)};
    });
}

int slg_ensemble(const slg_model* m, const slg_sde* sde, const double* q0, const double* p0,
                 int len, const slg_lyapunov* lw, int replicas, int record_coords,
                 slg_traj** out) {
    return guard([&] {
        slg::PhaseState x0{slg::Vec(q0, q0 + len), slg::Vec(p0, p0 + len)};
        auto trajs = slg::ensemble(*m->m, to_core(*sde), {x0}, replicas,
                                   coord_observables(record_coords), lw ? &lw->p : nullptr);
        for (int r = 0; r < replicas; ++r) out[r] = new slg_traj{std::move(trajs[r])};
    });
}

void slg_traj_free(slg_traj* t) { delete t; }

long long slg_traj_rows(const slg_traj* t) { return static_cast<long long>(t->t.times.size()); }
int slg_traj_cols(const slg_traj* t) { return static_cast<int>(t->t.columns.size()); }

const char* slg_traj_column_name(const slg_traj* t, int col) {
    if (col < 0 || col >= static_cast<int>(t->t.columns.size())) return nullptr;
    return t->t.columns[static_cast<std::size_t>(col)].c_str();
}

int slg_traj_copy(const slg_traj* t, double* times, double* records) {
    return guard([&] {
        const std::size_t rows = t->t.times.size();
        const std::size_t cols = t->t.columns.size();
        std::memcpy(times, t->t.times.data(), sizeof(double) * rows);
        std::memcpy(records, t->t.records.data(), sizeof(double) * rows * cols);
    });
}

int slg_traj_exit_flag(const slg_traj* t) { return t->t.exit_flag ? 1 : 0; }
long long slg_traj_fail_step(const slg_traj* t) { return t->t.fail_step; }
const char* slg_traj_fail_message(const slg_traj* t) { return t->t.fail_message.c_str(); }
long long slg_traj_shrink_events(const slg_traj* t) { return t->t.stats.shrink_events; }

int slg_traj_final_state(const slg_traj* t, double* q, double* p) {
    return guard([&] {
        std::memcpy(q, t->t.final_state.q.data(), sizeof(double) * t->t.final_state.q.size());
        std::memcpy(p, t->t.final_state.p.data(), sizeof(double) * t->t.final_state.p.size());
    });
}

/* ------------------------------------------------------------------ */

slg_lyapunov* slg_select_params(const slg_model* m, double gamma, double temperature, double b,
                                double kappa_slack, double r1_initial, long long samples,
                                uint64_t seed) {
    return guard_new<slg_lyapunov>([&] {
        slg::SelectOptions opts;
        if (kappa_slack > 0.0) opts.kappa_slack = kappa_slack;
        if (r1_initial > 0.0) opts.r1_initial = r1_initial;
        if (samples > 0) opts.samples = samples;
        opts.seed = seed;
        return new slg_lyapunov{slg::select_params(*m->m, gamma, temperature, b, opts)};
    });
}

void slg_lyapunov_free(slg_lyapunov* l) { delete l; }

int slg_lyapunov_get(const slg_lyapunov* l, double* b, double* kappa, double* C, double* r1,
                     double* r2) {
    return guard([&] {
        if (b) *b = l->p.b;
        if (kappa) *kappa = l->p.kappa;
        if (C) *C = l->p.C;
        if (r1) *r1 = l->p.r1;
        if (r2) *r2 = l->p.r2;
    });
}

double slg_hamiltonian(const slg_model* m, const double* q, const double* p, int len) {
    return guard_value([&] { return slg::hamiltonian(*m->m, make_span(q, len), make_span(p, len)); });
}

double slg_psi(const slg_lyapunov* l, const slg_model* m, const double* q, const double* p,
               int len) {
    return guard_value(
        [&] { return slg::eval_psi(l->p, *m->m, make_span(q, len), make_span(p, len)); });
}

double slg_log_w(const slg_lyapunov* l, const slg_model* m, const double* q, const double* p,
                 int len) {
    return guard_value(
        [&] { return slg::eval_log_w(l->p, *m->m, make_span(q, len), make_span(p, len)); });
}

double slg_generator_ratio(const slg_lyapunov* l, const slg_model* m, const double* q,
                           const double* p, int len) {
    return guard_value(
        [&] { return slg::generator_ratio(l->p, *m->m, make_span(q, len), make_span(p, len)); });
}

slg_drift_report* slg_verify_drift(const slg_lyapunov* l, const slg_model* m,
                                   long long n_samples, uint64_t seed) {
    return guard_new<slg_drift_report>([&] {
        slg::DriftOptions opts;
        if (n_samples > 0) opts.n_samples = n_samples;
        opts.seed = seed;
        return new slg_drift_report{slg::verify_drift(l->p, *m->m, opts)};
    });
}

void slg_drift_report_free(slg_drift_report* r) { delete r; }

int slg_drift_report_get(const slg_drift_report* r, double* c_hat, double* log_k_hat,
                         long long* samples, long long* violations, double* worst_margin,
                         int* pass) {
    return guard([&] {
        if (c_hat) *c_hat = r->r.c_hat;
        if (log_k_hat) *log_k_hat = r->r.log_k_hat;
        if (samples) *samples = r->r.samples;
        if (violations) *violations = r->r.violations;
        if (worst_margin) *worst_margin = r->r.worst_margin;
        if (pass) *pass = r->r.pass ? 1 : 0;
    });
}

int slg_drift_margin_hist(const slg_drift_report* r, long long* bins, int cap) {
    const int n = std::min<int>(cap, slg::DriftReport::kBins);
    for (int i = 0; i < n; ++i) bins[i] = r->r.margin_hist[static_cast<std::size_t>(i)];
    return slg::DriftReport::kBins;
}

int slg_drift_witness_count(const slg_drift_report* r) {
    return static_cast<int>(r->r.witnesses.size());
}

int slg_drift_witness(const slg_drift_report* r, int i, double* q, double* p, double* ratio,
                      double* log_w) {
    return guard([&] {
        const auto& w = r->r.witnesses.at(static_cast<std::size_t>(i));
        std::memcpy(q, w.q.data(), sizeof(double) * w.q.size());
        std::memcpy(p, w.p.data(), sizeof(double) * w.p.size());
        if (ratio) *ratio = w.ratio;
        if (log_w) *log_w = w.log_w;
    });
}

/* ------------------------------------------------------------------ */

slg_admissibility* slg_probe_admissibility(const slg_model* m, double temperature,
                                           uint64_t seed) {
    return guard_new<slg_admissibility>([&] {
        slg::ProbeOptions opts;
        opts.seed = seed;
        auto seqs = slg::default_probe_sequences(*m->m, opts);
        return new slg_admissibility{slg::probe_admissibility(*m->m, temperature, seqs, opts)};
    });
}

void slg_admissibility_free(slg_admissibility* a) { delete a; }

int slg_admissibility_pass(const slg_admissibility* a) { return a->r.pass ? 1 : 0; }
int slg_admissibility_sequences(const slg_admissibility* a) {
    return static_cast<int>(a->r.sequences.size());
}

int slg_admissibility_sequence(const slg_admissibility* a, int i, char* label, int label_cap,
                               int* valid, int* pass, int* n_points) {
    return guard([&] {
        const auto& s = a->r.sequences.at(static_cast<std::size_t>(i));
        if (label && label_cap > 0) {
            std::strncpy(label, s.label.c_str(), static_cast<std::size_t>(label_cap) - 1);
            label[label_cap - 1] = '\0';
        }
        if (valid) *valid = s.valid ? 1 : 0;
        if (pass) *pass = s.pass ? 1 : 0;
        if (n_points) *n_points = static_cast<int>(s.u.size());
    });
}

int slg_admissibility_sequence_data(const slg_admissibility* a, int i, double* u,
                                    double* grad_norm, double* ratio) {
    return guard([&] {
        const auto& s = a->r.sequences.at(static_cast<std::size_t>(i));
        if (u) std::memcpy(u, s.u.data(), sizeof(double) * s.u.size());
        if (grad_norm)
            std::memcpy(grad_norm, s.grad_norm.data(), sizeof(double) * s.grad_norm.size());
        if (ratio) std::memcpy(ratio, s.ratio.data(), sizeof(double) * s.ratio.size());
    });
}

int slg_admissibility_integral(const slg_admissibility* a, double* estimate, double* std_error,
                               int* converged, int* by_quadrature) {
    return guard([&] {
        if (estimate) *estimate = a->r.integral_estimate;
        if (std_error) *std_error = a->r.integral_std_error;
        if (converged) *converged = a->r.integral_converged ? 1 : 0;
        if (by_quadrature) *by_quadrature = a->r.integral_by_quadrature ? 1 : 0;
    });
}

int slg_gradient_lower_bound(const slg_model* m, long long samples, uint64_t seed, double* c1,
                             double* c2, double* D, double* worst_margin, int* pass) {
    return guard([&] {
        auto rep = slg::verify_gradient_lower_bound(*m->m, samples, seed);
        if (c1) *c1 = rep.c1;
        if (c2) *c2 = rep.c2;
        if (D) *D = rep.D;
        if (worst_margin) *worst_margin = rep.worst_margin;
        if (pass) *pass = rep.pass ? 1 : 0;
    });
}

/* ------------------------------------------------------------------ */

namespace {
std::vector<slg::Vec> to_waypoints(const double* waypoints, int n_way, int len) {
    std::vector<slg::Vec> out;
    for (int k = 0; k < n_way; ++k)
        out.emplace_back(waypoints + static_cast<std::size_t>(k) * len,
                         waypoints + static_cast<std::size_t>(k + 1) * len);
    return out;
}
}  // namespace

slg_path* slg_build_path(const slg_model* m, const double* q0, const double* p0,
                         const double* q1, const double* p1, int len, double t,
                         const double* waypoints, int n_way) {
    return guard_new<slg_path>([&] {
        slg::PhaseState a{slg::Vec(q0, q0 + len), slg::Vec(p0, p0 + len)};
        slg::PhaseState b{slg::Vec(q1, q1 + len), slg::Vec(p1, p1 + len)};
        auto ways = waypoints ? to_waypoints(waypoints, n_way, len) : std::vector<slg::Vec>{};
        return new slg_path{slg::build_path(*m->m, a, b, t, ways)};
    });
}

void slg_path_free(slg_path* p) { delete p; }

int slg_path_eval(const slg_path* p, double s, double* phi, double* dphi, double* ddphi) {
    return guard([&] {
        const int dim = p->p.dim();
        slg::Vec a(dim), b(dim), c(dim);
        p->p.eval(s, a, b, c);
        if (phi) std::memcpy(phi, a.data(), sizeof(double) * dim);
        if (dphi) std::memcpy(dphi, b.data(), sizeof(double) * dim);
        if (ddphi) std::memcpy(ddphi, c.data(), sizeof(double) * dim);
    });
}

int slg_control_xi(const slg_model* m, const slg_path* p, double gamma, double temperature,
                   double s, double* xi) {
    return guard([&] {
        auto v = slg::control_at(*m->m, p->p, gamma, temperature, s);
        std::memcpy(xi, v.data(), sizeof(double) * v.size());
    });
}

int slg_verify_reachability(const slg_model* m, const double* q0, const double* p0,
                            const double* q1, const double* p1, int len, double t, double gamma,
                            double temperature, const double* waypoints, int n_way,
                            double* endpoint_error, double* tolerance, double* max_u,
                            double* cost, int* pass) {
    return guard([&] {
        slg::PhaseState a{slg::Vec(q0, q0 + len), slg::Vec(p0, p0 + len)};
        slg::PhaseState b{slg::Vec(q1, q1 + len), slg::Vec(p1, p1 + len)};
        auto ways = waypoints ? to_waypoints(waypoints, n_way, len) : std::vector<slg::Vec>{};
        auto rep = slg::verify_reachability(*m->m, a, b, t, gamma, temperature, ways);
        if (endpoint_error) *endpoint_error = rep.endpoint_error;
        if (tolerance) *tolerance = rep.tolerance;
        if (max_u) *max_u = rep.max_u;
        if (cost) *cost = rep.cost;
        if (pass) *pass = rep.pass ? 1 : 0;
    });
}

/* ------------------------------------------------------------------ */

slg_gibbs* slg_gibbs_reference(const slg_model* m, double temperature, double u_cap,
                               int grid_n) {
    return guard_new<slg_gibbs>([&] {
        slg::GridSpec spec;
        spec.u_cap = u_cap;
        if (grid_n > 0) spec.n = grid_n;
        return new slg_gibbs{slg::gibbs_reference(*m->m, temperature, spec)};
    });
}

void slg_gibbs_free(slg_gibbs* g) { delete g; }

int slg_gibbs_get(const slg_gibbs* g, double* z_q, double* z_p, double* u_cap,
                  double* tail_bound, int* grid_len) {
    return guard([&] {
        if (z_q) *z_q = g->g.z_q;
        if (z_p) *z_p = g->g.z_p;
        if (u_cap) *u_cap = g->g.u_cap;
        if (tail_bound) *tail_bound = g->g.tail_bound;
        if (grid_len) *grid_len = static_cast<int>(g->g.grid.size());
    });
}

int slg_gibbs_grid(const slg_gibbs* g, double* q, double* density, double* cdf) {
    return guard([&] {
        if (q) std::memcpy(q, g->g.grid.data(), sizeof(double) * g->g.grid.size());
        if (density)
            std::memcpy(density, g->g.density.data(), sizeof(double) * g->g.density.size());
        if (cdf) std::memcpy(cdf, g->g.cdf.data(), sizeof(double) * g->g.cdf.size());
    });
}

int slg_gibbs_sample_positions(const slg_gibbs* g, long long n, uint64_t seed, double* out) {
    return guard([&] {
        slg::CounterRng rng(seed, 0x6A3B);
        for (long long i = 0; i < n; ++i) out[i] = g->g.sample_position(rng);
    });
}

int slg_histogram_distance(const double* samples, long long n, const slg_gibbs* g, int bins,
                           double* tv, double* ks) {
    return guard([&] {
        auto hd = slg::histogram_distance(make_span(samples, static_cast<int>(n)), g->g, bins);
        if (tv) *tv = hd.tv;
        if (ks) *ks = hd.ks;
    });
}

double slg_ks_gaussian(const double* samples, long long n, double variance) {
    return guard_value([&] {
        return slg::ks_statistic_gaussian(make_span(samples, static_cast<int>(n)), variance);
    });
}

double slg_ks_critical(double alpha, long long n) { return slg::ks_critical_value(alpha, n); }

namespace {
std::vector<slg::Vec> to_series(const double* data, int reps, long long len) {
    std::vector<slg::Vec> out;
    for (int r = 0; r < reps; ++r)
        out.emplace_back(data + static_cast<std::size_t>(r) * len,
                         data + static_cast<std::size_t>(r + 1) * len);
    return out;
}
}  // namespace

int slg_decay_fit(const double* series, int reps, long long len, double dt_between,
                  double burn_in_frac, double* eta_hat, double* r_squared, int* lags_used,
                  int* reliable, double* acf_out, int acf_cap) {
    return guard([&] {
        auto fit = slg::decay_fit(to_series(series, reps, len), dt_between, burn_in_frac);
        if (eta_hat) *eta_hat = fit.eta_hat;
        if (r_squared) *r_squared = fit.r_squared;
        if (lags_used) *lags_used = fit.lags_used;
        if (reliable) *reliable = fit.reliable ? 1 : 0;
        if (acf_out && acf_cap > 0) {
            const int n = std::min<int>(acf_cap, static_cast<int>(fit.acf.size()));
            std::memcpy(acf_out, fit.acf.data(), sizeof(double) * static_cast<std::size_t>(n));
        }
    });
}

int slg_equipartition(const double* p2, int reps, long long len, double temperature,
                      int n_particles, int space_dim, double burn_in_frac, double* mean_p2,
                      double* std_error, double* z, int* pass) {
    return guard([&] {
        auto rep = slg::equipartition(to_series(p2, reps, len), temperature, n_particles,
                                      space_dim, burn_in_frac);
        if (mean_p2) *mean_p2 = rep.mean_p2;
        if (std_error) *std_error = rep.std_error;
        if (z) *z = rep.z;
        if (pass) *pass = rep.pass ? 1 : 0;
    });
}

int slg_moment_bound_check(const double* times, long long nt, const double* log_w,
                           const double* h, int reps, double log_w0, double h0, double c,
                           double log_k, double gamma, double temperature, int n_particles,
                           int space_dim, int* pass_w, int* pass_h) {
    return guard([&] {
        slg::Vec t(times, times + nt);
        auto rep = slg::moment_bound_check(t, to_series(log_w, reps, nt), to_series(h, reps, nt),
                                           log_w0, h0, c, log_k, gamma, temperature, n_particles,
                                           space_dim);
        if (pass_w) *pass_w = rep.pass_w ? 1 : 0;
        if (pass_h) *pass_h = rep.pass_h ? 1 : 0;
    });
}

int slg_minorization_overlap(const slg_model* m, const slg_sde* sde, const slg_lyapunov* l,
                             double log_r, double t0, int starts, int replicas_per_start,
                             int bins, uint64_t seed, double floor, double* overlap,
                             int* reliable, int* pass) {
    return guard([&] {
        auto rep = slg::minorization_overlap(*m->m, to_core(*sde), l->p, log_r, t0, starts,
                                             replicas_per_start, bins, seed, floor);
        if (overlap) *overlap = rep.overlap;
        if (reliable) *reliable = rep.reliable ? 1 : 0;
        if (pass) *pass = rep.pass ? 1 : 0;
    });
}

int slg_test_function_gap(const slg_model* m, const slg_sde* sde, const slg_gibbs* g,
                          const slg_lyapunov* params, const double* q0, const double* p0,
                          int len, const double* t_grid, int nt, int replicas,
                          const char* phi_name, double* gaps, double* std_errors,
                          double* eta_hat, double* r_squared) {
    return guard([&] {
        slg::PhaseState x0{slg::Vec(q0, q0 + len), slg::Vec(p0, p0 + len)};
        slg::Vec grid(t_grid, t_grid + nt);
        auto scan = slg::test_function_gap(*m->m, to_core(*sde), g->g,
                                           params ? &params->p : nullptr, x0, grid, replicas,
                                           phi_name);
        for (int i = 0; i < nt && i < static_cast<int>(scan.points.size()); ++i) {
            if (gaps) gaps[i] = scan.points[static_cast<std::size_t>(i)].gap;
            if (std_errors)
                std_errors[i] = scan.points[static_cast<std::size_t>(i)].std_error;
        }
        if (eta_hat) *eta_hat = scan.eta_hat;
        if (r_squared) *r_squared = scan.r_squared;
    });
}

} /* extern "C" */
