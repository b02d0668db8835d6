#pragma once

#include <optional>
#include <string>

#include "core/dynamics.hpp"
#include "core/lyapunov.hpp"
#include "core/potential.hpp"
#include "core/vec.hpp"

namespace slg {

// Quadrature reference for the Gibbs measure's position marginal
// (exact at desk dimension N*d <= 2; truncated at U <= u_cap with a
// reported tail estimate).  The momentum part is Gaussian and analytic.
struct GibbsReference {
    double temperature = 0.0;
    double z_q = 0.0;  // position normalizer over the truncated domain
    double z_p = 0.0;  // (2 pi T)^(Nd/2)
    double u_cap = 0.0;
    double tail_bound = 0.0;
    int nd = 1;

    // 1D: grid (fine), density and CDF on the grid
    Vec grid, density, cdf;
    double lo = 0.0, hi = 0.0;

    // 2D: tensor grid and density values (row-major over grid_x x grid_y)
    Vec grid_x, grid_y;
    Mat density2;

    double sample_position(CounterRng& rng) const;  // 1D inverse-CDF
    double cdf_at(double x) const;                  // 1D
    double bin_mass(double a, double b) const { return cdf_at(b) - cdf_at(a); }
};

struct GridSpec {
    double u_cap = 0.0;  // 0 = default 60 T
    int n = 4096;
};

GibbsReference gibbs_reference(const PotentialModel& model, double temperature,
                               const GridSpec& spec = {});

struct HistDistance {
    double tv = 0.0;
    double ks = 0.0;
    bool low_sample_warning = false;
};

// Plain TV / KS of a 1D position sample against the quadrature reference.
HistDistance histogram_distance(Span samples, const GibbsReference& ref, int bins);

// KS statistic of a sample against the centered Gaussian with given variance.
double ks_statistic_gaussian(Span samples, double variance);
// Asymptotic critical value at significance alpha (0.01 or 0.05).
double ks_critical_value(double alpha, long long n);

struct DecayFit {
    Vec lag_times;
    Vec acf;
    double eta_hat = 0.0;
    double r_squared = 0.0;
    int lags_used = 0;
    bool reliable = false;
    std::string observable;
};

// Pooled autocorrelation of per-replica series (burn-in discarded), then a
// weighted LS fit of log acf over lags with acf above the floor.
DecayFit decay_fit(const std::vector<Vec>& series_per_replica, double dt_between_samples,
                   double burn_in_frac = 0.5, double acf_floor = 0.05, int min_lags = 5,
                   int max_lags = 0);

struct EquipartitionReport {
    double mean_p2 = 0.0;
    double std_error = 0.0;
    double target = 0.0;  // T N d
    double z = 0.0;
    bool pass = false;  // |z| <= 3
};

EquipartitionReport equipartition(const std::vector<Vec>& p2_per_replica, double temperature,
                                  int n, int d, double burn_in_frac = 0.5);

struct MomentBoundReport {
    bool pass_w = false;
    bool pass_h = false;
    Vec t;
    Vec log_mean_w, log_bound_w;
    Vec mean_h, bound_h;
    int overflow_flags = 0;
    double c = 0.0, log_k = 0.0;
};

// Semigroup bound  E W(x_t) <= exp(-c t) W(x0) + K/c  checked in log space
// with a 3-SE slack, plus the weaker H bound  E H(x_t) <= H(x0) + gamma T N d t.
MomentBoundReport moment_bound_check(const Vec& times, const std::vector<Vec>& log_w_per_replica,
                                     const std::vector<Vec>& h_per_replica, double log_w0,
                                     double h0, double c, double log_k, double gamma,
                                     double temperature, int n, int d);

struct GapPoint {
    double t = 0.0;
    double gap = 0.0;
    double std_error = 0.0;
};

struct GapScan {
    std::string phi;
    double mu_phi = 0.0;
    double norm = 1.0;  // sampled sup of |phi| / (1 + W)
    std::vector<GapPoint> points;
    double eta_hat = 0.0;
    double r_squared = 0.0;
    bool fit_reliable = false;
};

// Named bounded test functions over (q, p); 1D position models.
// Knows: "one", "tanh_q", "atan_q", "tanh_p".
GapScan test_function_gap(const PotentialModel& model, const SdeConfig& sde,
                          const GibbsReference& ref, const LyapunovParams* params,
                          const PhaseState& x0, const Vec& t_grid, int replicas,
                          const std::string& phi_name);

struct OverlapReport {
    double overlap = 0.0;
    bool reliable = false;
    bool pass = false;
    int starts = 0, replicas = 0, bins = 0;
    double floor = 0.01;
};

// Empirical surrogate for the minorization condition: histogram overlap of
// the time-t0 laws from several starts drawn in {W <= R}.
OverlapReport minorization_overlap(const PotentialModel& model, const SdeConfig& sde,
                                   const LyapunovParams& params, double log_r, double t0,
                                   int starts, int replicas_per_start, int bins,
                                   std::uint64_t seed, double floor = 0.01);

}  // namespace slg
