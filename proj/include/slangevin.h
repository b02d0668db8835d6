/*
 * slangevin -- underdamped Langevin dynamics with singular potentials.
 *
 * C API of the shared library: opaque handles, integer status codes,
 * thread-local error messages via slg_last_error().  All functions are
 * safe to call from multiple threads as long as each handle is used by
 * one thread at a time; handles are immutable after creation except for
 * their destruction.
 *
 * Status codes: 0 success; SLG_ERR_INVALID for bad arguments or
 * configuration; SLG_ERR_DOMAIN when a state leaves the admissible set;
 * SLG_ERR_FAIL for verification / selection / sampling failures;
 * SLG_ERR_INTERNAL otherwise.  Functions returning doubles signal errors
 * with NaN (+inf is a legitimate potential value, never an error).
 */

#ifndef SLANGEVIN_H
#define SLANGEVIN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SLG_OK 0
#define SLG_ERR_INVALID 1
#define SLG_ERR_DOMAIN 2
#define SLG_ERR_FAIL 3
#define SLG_ERR_INTERNAL 4

#define SLG_SCHEME_EULER_MARUYAMA 0
#define SLG_SCHEME_SPLIT_OU 1

/* Message for the most recent failure on this thread. */
const char* slg_last_error(void);

/* Caps worker parallelism globally (0 = hardware concurrency).  Results
 * never depend on this value. */
void slg_set_max_threads(int n);

typedef struct slg_model slg_model;
typedef struct slg_lyapunov slg_lyapunov;
typedef struct slg_drift_report slg_drift_report;
typedef struct slg_admissibility slg_admissibility;
typedef struct slg_traj slg_traj;
typedef struct slg_gibbs slg_gibbs;
typedef struct slg_path slg_path;

/* ------------------------------------------------------------------ */
/* Potential models                                                    */

slg_model* slg_model_poly_confine(double A, double alpha, int n_particles, int space_dim);
slg_model* slg_model_singular_pair_1d(double A, double alpha, double B, double beta);
/* well_c1 > 0 adds the Lennard-Jones well -c1 r^-6 (+ shift); needs beta = 12. */
slg_model* slg_model_interacting(double A, double alpha, double B, double beta, double well_c1,
                                 int n_particles, int space_dim);
slg_model* slg_model_composite(const double* conf_A, const double* conf_alpha, int n_conf,
                               const double* pair_B, const double* pair_beta, int n_pair,
                               int n_particles, int space_dim);
void slg_model_free(slg_model* m);

int slg_model_dim(const slg_model* m); /* N*d, or -1 */
/* Strictly interior reference configuration (length N*d). */
int slg_model_anchor(const slg_model* m, double* q_out);
/* U(q); +inf when q is outside O. */
double slg_potential(const slg_model* m, const double* q, int len);
int slg_gradient(const slg_model* m, const double* q, int len, double* out);
int slg_hessian(const slg_model* m, const double* q, int len, double* out_row_major);
int slg_in_domain(const slg_model* m, const double* q, int len); /* 1 / 0 / -code */

/* ------------------------------------------------------------------ */
/* SDE configuration                                                   */

typedef struct {
    double gamma;
    double temperature; /* >= 0; zero is the deterministic test hook */
    double dt;
    long long n_steps;
    int scheme;
    uint64_t seed;
    long long sample_every;
    double energy_jump_cap;
    int max_dt_shrink;
} slg_sde;

void slg_sde_defaults(slg_sde* sde);

/* ------------------------------------------------------------------ */
/* Simulation                                                          */

/* record_coords != 0 appends q1 and p1 (first coordinate pair) columns. */
slg_traj* slg_simulate(const slg_model* m, const slg_sde* sde, const double* q0,
                       const double* p0, int len, const slg_lyapunov* logw_or_null, int replica,
                       int record_coords);
/* Independent replicas 0..replicas-1 with scheduler-independent streams. */
int slg_ensemble(const slg_model* m, const slg_sde* sde, const double* q0, const double* p0,
                 int len, const slg_lyapunov* logw_or_null, int replicas, int record_coords,
                 slg_traj** out);
void slg_traj_free(slg_traj* t);

long long slg_traj_rows(const slg_traj* t);
int slg_traj_cols(const slg_traj* t);
const char* slg_traj_column_name(const slg_traj* t, int col);
int slg_traj_copy(const slg_traj* t, double* times, double* records_row_major);
int slg_traj_exit_flag(const slg_traj* t);
/* Step index of the failure when exit_flag is set, -1 otherwise. */
long long slg_traj_fail_step(const slg_traj* t);
const char* slg_traj_fail_message(const slg_traj* t);
long long slg_traj_shrink_events(const slg_traj* t);
int slg_traj_final_state(const slg_traj* t, double* q, double* p);

/* ------------------------------------------------------------------ */
/* Lyapunov function W = exp(b H + psi) and the drift condition        */

slg_lyapunov* slg_select_params(const slg_model* m, double gamma, double temperature, double b,
                                double kappa_slack, double r1_initial, long long samples,
                                uint64_t seed);
void slg_lyapunov_free(slg_lyapunov* l);
int slg_lyapunov_get(const slg_lyapunov* l, double* b, double* kappa, double* C, double* r1,
                     double* r2);

double slg_hamiltonian(const slg_model* m, const double* q, const double* p, int len);
double slg_psi(const slg_lyapunov* l, const slg_model* m, const double* q, const double* p,
               int len);
double slg_log_w(const slg_lyapunov* l, const slg_model* m, const double* q, const double* p,
                 int len);
/* Closed-form L W / W. */
double slg_generator_ratio(const slg_lyapunov* l, const slg_model* m, const double* q,
                           const double* p, int len);

slg_drift_report* slg_verify_drift(const slg_lyapunov* l, const slg_model* m,
                                   long long n_samples, uint64_t seed);
void slg_drift_report_free(slg_drift_report* r);
int slg_drift_report_get(const slg_drift_report* r, double* c_hat, double* log_k_hat,
                         long long* samples, long long* violations, double* worst_margin,
                         int* pass);
/* Histogram over log10 of the fresh-sample margins; returns bin count. */
int slg_drift_margin_hist(const slg_drift_report* r, long long* bins, int cap);
int slg_drift_witness_count(const slg_drift_report* r);
int slg_drift_witness(const slg_drift_report* r, int i, double* q, double* p, double* ratio,
                      double* log_w);

/* ------------------------------------------------------------------ */
/* Admissibility probes                                                */

slg_admissibility* slg_probe_admissibility(const slg_model* m, double temperature,
                                           uint64_t seed);
void slg_admissibility_free(slg_admissibility* a);
int slg_admissibility_pass(const slg_admissibility* a);
int slg_admissibility_sequences(const slg_admissibility* a);
int slg_admissibility_sequence(const slg_admissibility* a, int i, char* label, int label_cap,
                               int* valid, int* pass, int* n_points);
int slg_admissibility_sequence_data(const slg_admissibility* a, int i, double* u,
                                    double* grad_norm, double* ratio);
int slg_admissibility_integral(const slg_admissibility* a, double* estimate, double* std_error,
                               int* converged, int* by_quadrature);

int slg_gradient_lower_bound(const slg_model* m, long long samples, uint64_t seed, double* c1,
                             double* c2, double* D, double* worst_margin, int* pass);

/* ------------------------------------------------------------------ */
/* Controllability                                                     */

slg_path* slg_build_path(const slg_model* m, const double* q0, const double* p0,
                         const double* q1, const double* p1, int len, double t,
                         const double* waypoints, int n_way);
void slg_path_free(slg_path* p);
int slg_path_eval(const slg_path* p, double s, double* phi, double* dphi, double* ddphi);
int slg_control_xi(const slg_model* m, const slg_path* p, double gamma, double temperature,
                   double s, double* xi);
int slg_verify_reachability(const slg_model* m, const double* q0, const double* p0,
                            const double* q1, const double* p1, int len, double t, double gamma,
                            double temperature, const double* waypoints, int n_way,
                            double* endpoint_error, double* tolerance, double* max_u,
                            double* cost, int* pass);

/* ------------------------------------------------------------------ */
/* Convergence diagnostics                                             */

slg_gibbs* slg_gibbs_reference(const slg_model* m, double temperature, double u_cap,
                               int grid_n);
void slg_gibbs_free(slg_gibbs* g);
int slg_gibbs_get(const slg_gibbs* g, double* z_q, double* z_p, double* u_cap,
                  double* tail_bound, int* grid_len);
int slg_gibbs_grid(const slg_gibbs* g, double* q, double* density, double* cdf);
int slg_gibbs_sample_positions(const slg_gibbs* g, long long n, uint64_t seed, double* out);

int slg_histogram_distance(const double* samples, long long n, const slg_gibbs* g, int bins,
                           double* tv, double* ks);
double slg_ks_gaussian(const double* samples, long long n, double variance);
double slg_ks_critical(double alpha, long long n);

int slg_decay_fit(const double* series_row_major, int reps, long long len, double dt_between,
                  double burn_in_frac, double* eta_hat, double* r_squared, int* lags_used,
                  int* reliable, double* acf_out, int acf_cap);

int slg_equipartition(const double* p2_row_major, int reps, long long len, double temperature,
                      int n_particles, int space_dim, double burn_in_frac, double* mean_p2,
                      double* std_error, double* z, int* pass);

int slg_moment_bound_check(const double* times, long long nt, const double* log_w_row_major,
                           const double* h_row_major, int reps, double log_w0, double h0,
                           double c, double log_k, double gamma, double temperature,
                           int n_particles, int space_dim, int* pass_w, int* pass_h);

int slg_minorization_overlap(const slg_model* m, const slg_sde* sde, const slg_lyapunov* l,
                             double log_r, double t0, int starts, int replicas_per_start,
                             int bins, uint64_t seed, double floor, double* overlap,
                             int* reliable, int* pass);

int slg_test_function_gap(const slg_model* m, const slg_sde* sde, const slg_gibbs* g,
                          const slg_lyapunov* params_or_null, const double* q0, const double* p0,
                          int len, const double* t_grid, int nt, int replicas,
                          const char* phi_name, double* gaps, double* std_errors,
                          double* eta_hat, double* r_squared);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SLANGEVIN_H */
