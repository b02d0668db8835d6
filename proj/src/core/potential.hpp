#pragma once

#include <memory>
#include <optional>
#include <string>

#include "core/rng.hpp"
#include "core/vec.hpp"

namespace slg {

// A point x = (q, p) in X = O x (R^d)^N, flat layout: particle-major,
// coordinate-minor (q[i*d + k] is coordinate k of particle i).
struct PhaseState {
    Vec q;
    Vec p;
};

enum class Family { PolyConfine, SingularPair1D, Interacting, Composite };

enum class EscapeRoute { Outward, Collapse };

// Potential energy U: (R^d)^N -> [0, +inf].  Evaluations of the gradient
// and Hessian are defined exactly on {U < inf}; value() returns +inf off
// the domain instead of throwing.  All methods are pure and thread-safe.
//
// Caveat: value() can also overflow to +inf at extreme in-domain states
// (e.g. a pair distance of 1e-300 with beta = 12); is_in_domain() is the
// structural membership test and stays true there.
class PotentialModel {
public:
    virtual ~PotentialModel() = default;

    Family family() const { return family_; }
    int particles() const { return n_; }
    int space_dim() const { return d_; }
    int dim() const { return n_ * d_; }

    double value(Span q) const;
    void gradient(Span q, std::span<double> out) const;
    void hessian(Span q, Mat& out) const;
    bool is_in_domain(Span q) const;

    Vec gradient(Span q) const {
        Vec g(dim());
        gradient(q, g);
        return g;
    }

    // Strictly interior reference configuration with moderate U.
    virtual Vec anchor() const = 0;

    // True when the Outward/Collapse deformations below are available.
    virtual bool has_collapse_route() const { return false; }

    // Configuration with U(q) ~= u_target reached along an escape route,
    // randomized in direction.  Throws SamplingError if out of reach.
    Vec escape_config(EscapeRoute route, double u_target, CounterRng& rng) const;

    // One-parameter family used by probes: outward scaling (s >= 1) or
    // contraction of the closest pair / of q itself (s <= 1).
    Vec deformed(EscapeRoute route, double s, Span base) const { return deform(route, s, base); }

    // Axis-aligned box guaranteed to contain {U <= u_cap}, derived from the
    // confinement term.  Throws SamplingError when the sublevel set is
    // unbounded (e.g. the zero-potential test hook).
    virtual void sublevel_box(double u_cap, Vec& lo, Vec& hi) const = 0;

    // Rejection sampling of {U <= u_max}; throws SamplingError after the
    // 100x oversampling budget.
    Vec sample_sublevel(double u_max, CounterRng& rng) const;

    // Path-component chart.  In d = 1 the ordering cannot change; the
    // singular 1D family is confined to q > 0.
    virtual bool same_component(Span qa, Span qb) const;

    // Smallest pairwise distance, +inf when there are no pair terms.
    double min_pair_distance(Span q) const;

    bool has_pair_terms() const { return pair_terms_; }

protected:
    PotentialModel(Family f, int n, int d, bool pair_terms)
        : family_(f), n_(n), d_(d), pair_terms_(pair_terms) {}

    virtual double value_impl(Span q) const = 0;
    virtual void gradient_impl(Span q, std::span<double> out) const = 0;
    virtual void hessian_impl(Span q, Mat& out) const = 0;
    virtual bool in_domain_impl(Span q) const = 0;

    // One-parameter deformation with U monotone toward the target; used by
    // escape_config's bisection.
    virtual Vec deform(EscapeRoute route, double s, Span base) const;

    void check_dim(Span q) const;

    Family family_;
    int n_, d_;
    bool pair_terms_;
};

using ModelPtr = std::shared_ptr<const PotentialModel>;

// U(q) = A |q|^alpha over the full N*d vector; O = (R^d)^N.
ModelPtr make_poly_confine(double A, double alpha, int n, int d);

// Single particle on the line: U(q) = A q^alpha + B q^(-beta) for q > 0,
// +inf otherwise.
ModelPtr make_singular_pair_1d(double A, double alpha, double B, double beta);

// U(q) = sum_i A|q_i|^alpha + sum_{i<j} U_I(|q_i - q_j|) with
// U_I(r) = B r^(-beta) [- c1 r^(-6) + c1^2/(4B) when c1 > 0, beta = 12].
// The additive shift keeps each pair term >= 0.  In d = 1 the domain is
// the ordered chart q_1 < ... < q_N.
ModelPtr make_interacting(double A, double alpha, double B, double beta, double well_c1, int n,
                          int d);

// Sums of confinement powers (per particle) and pairwise inverse powers.
ModelPtr make_composite(Span conf_A, Span conf_alpha, Span pair_B, Span pair_beta, int n, int d);

// ---------------------------------------------------------------------
// Admissibility probes (numerical evidence for the definition's asymptotic
// conditions; a finite probe cannot prove the limits).

struct ProbeSequence {
    std::string label;
    std::vector<Vec> points;
};

struct SequenceReport {
    std::string label;
    bool valid = true;        // every point lies in O
    bool escaping = false;    // U strictly increasing along the sequence
    Vec u, grad_norm, ratio;  // ratio = |hess|_F / |grad|^2
    bool grad_increasing = false;
    bool ratio_decreasing = false;
    bool pass = false;
};

struct AdmissibilityReport {
    std::vector<SequenceReport> sequences;
    double integral_estimate = 0.0;   // of exp(-U/T) over O (truncated)
    double integral_std_error = 0.0;  // Monte Carlo path only
    bool integral_converged = false;
    bool integral_by_quadrature = false;
    bool pass = false;
    std::string note = "numerical evidence, not proof";
};

struct ProbeOptions {
    int points_per_sequence = 12;
    int trend_window = 5;
    std::uint64_t seed = 1;
    double u_cap_factor = 60.0;     // integrability truncation at U <= factor*T
    long long mc_samples = 200000;  // used when N*d > 3
};

std::vector<ProbeSequence> default_probe_sequences(const PotentialModel& model,
                                                   const ProbeOptions& opts);

AdmissibilityReport probe_admissibility(const PotentialModel& model, double temperature,
                                        const std::vector<ProbeSequence>& sequences,
                                        const ProbeOptions& opts = {});

// ---------------------------------------------------------------------
// Gradient lower bound  |grad U| >= c1 |q|^(alpha-1) + c2 sum r_ij^(-beta-1) - D
// for the interacting family, with proof-seeded c1, c2 and D grown by
// doubling until the sampled inequality holds.

struct GradientBoundReport {
    double c1 = 0.0, c2 = 0.0, D = 0.0;
    bool pass = false;
    long long samples = 0;
    double worst_margin = 0.0;      // min over samples of lhs - rhs (with final D)
    double margin_q10 = 0.0, margin_q50 = 0.0, margin_q90 = 0.0;
};

GradientBoundReport verify_gradient_lower_bound(const PotentialModel& model, long long n_samples,
                                                std::uint64_t seed);

}  // namespace slg
