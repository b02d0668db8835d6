#pragma once

#include <array>
#include <cstdint>

#include "core/potential.hpp"
#include "core/smoothstep.hpp"
#include "core/vec.hpp"

namespace slg {

struct SdeConfig;  // dynamics.hpp

// Smooth switch: 0 below r1, 1 above r2, quintic smoothstep between.
// |derivative| <= 15/8 / (r2 - r1) <= 2 / (r2 - r1).
struct Cutoff {
    double r1 = 0.0, r2 = 1.0;
    double value(double u) const { return Smoothstep::value((u - r1) / (r2 - r1)); }
    double deriv(double u) const { return Smoothstep::deriv((u - r1) / (r2 - r1)) / (r2 - r1); }
    double deriv_bound() const { return 15.0 / (8.0 * (r2 - r1)); }
};

// Parameters of W = exp(b H + psi), psi = kappa a(U) p.grad U / |grad U|^2,
// chosen so the drift inequality holds globally:
//   b T < 1,  kappa > 3 gamma N d,  C > 4 |2bT-1| kappa / (b (1-bT)),
// and on {U >= r1/2}:  |grad U| >= 1,  |grad G| < b gamma (1-bT)/(8 kappa),
//   (kappa C/2 |2bT-1| gamma + kappa^2 gamma T) |G|^2 <= gamma b T N d,
// with G = grad U / |grad U|^2.
struct LyapunovParams {
    double b = 0.0;
    double kappa = 0.0;
    double C = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double gamma = 0.0;
    double temperature = 0.0;
    int n = 0, d = 0;

    Cutoff cutoff() const { return {r1, r2}; }
    double drift_coeff() const { return b * gamma * (1.0 - b * temperature); }
    // |p|^2 above which the generator ratio is already < -gamma N d
    double p2_cap() const { return 6.0 * gamma * n * d / drift_coeff(); }
};

struct SelectOptions {
    double kappa_slack = 1e-3;
    double r1_initial = 1.0;
    long long samples = 100000;
    std::uint64_t seed = 2024;
    double r1_max = 1e12;
    double u_probe_decades = 6.0;  // probe conditions up to r1/2 * 10^decades
};

// Constructive version of the proof's parameter picking: kappa and C at
// their minimal slack, r1 doubled until the sampled inequalities hold on
// {U >= r1/2}, r2 sized so the cutoff slope bound is automatic.
LyapunovParams select_params(const PotentialModel& model, double gamma, double temperature,
                             double b, const SelectOptions& opts = {});

double hamiltonian(const PotentialModel& model, Span q, Span p);

// psi and the exponent of W (log W = b H + psi); evaluation never
// materializes the exponential.
double eval_psi(const LyapunovParams& params, const PotentialModel& model, Span q, Span p);
double eval_log_w(const LyapunovParams& params, const PotentialModel& model, Span q, Span p);
// exp(log W); sets *overflow when the double exponential saturates.
double eval_w(const LyapunovParams& params, const PotentialModel& model, Span q, Span p,
              bool* overflow = nullptr);

// Closed-form L W / W.
double generator_ratio(const LyapunovParams& params, const PotentialModel& model, Span q, Span p);

// Same quantity assembled through L e^V / e^V = L V + gamma T |grad_p V|^2
// with V = b H + psi; used as an independent algebraic route.
double generator_ratio_via_split(const LyapunovParams& params, const PotentialModel& model,
                                 Span q, Span p);

// Analytic derivative bundle of a scalar field f(q,p).
struct FieldDerivatives {
    double value = 0.0;
    Vec grad_q;
    Vec grad_p;
    double lap_p = 0.0;
};

struct SplitGenerator {
    double h_part = 0.0;  // p . grad_q f - grad U . grad_p f
    double r_part = 0.0;  // -p . grad_p f + T lap_p f
    double a_part = 0.0;  // -grad U . grad_p f
    double total = 0.0;   // h_part + gamma r_part
};

SplitGenerator apply_split_generator(const PotentialModel& model, double gamma,
                                     double temperature, const FieldDerivatives& f, Span q,
                                     Span p);

FieldDerivatives hamiltonian_derivatives(const PotentialModel& model, Span q, Span p);
FieldDerivatives psi_derivatives(const LyapunovParams& params, const PotentialModel& model,
                                 Span q, Span p);

// ---------------------------------------------------------------------
// Drift verification

enum class Stratum { CompactLowP, LargeP, HighU, Escape };

PhaseState sample_stratified(const LyapunovParams& params, const PotentialModel& model,
                             Stratum stratum, CounterRng& rng);

struct DriftWitness {
    Vec q, p;
    double ratio = 0.0;
    double log_w = 0.0;
};

struct DriftOptions {
    long long n_samples = 100000;
    std::uint64_t seed = 7;
    int refine_starts = 10;
    int refine_iters = 400;
};

struct DriftReport {
    double c_hat = 0.0;
    double log_k_hat = -std::numeric_limits<double>::infinity();
    long long samples = 0;
    long long violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    // histogram over log10(margin), margin in the log-Lyapunov scale
    static constexpr int kBins = 24;
    std::array<long long, kBins> margin_hist{};
    double p2_cap = 0.0;
    double max_far_ratio = 0.0;
    std::vector<DriftWitness> witnesses;
    bool pass = false;

    double k_hat() const { return std::exp(log_k_hat); }
};

DriftReport verify_drift(const LyapunovParams& params, const PotentialModel& model,
                         const DriftOptions& opts = {});

}  // namespace slg
