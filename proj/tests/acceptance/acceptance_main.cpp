// Acceptance suite: runs every gate at its stated tolerance and prints one
// PASS/FAIL line per criterion.  Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "core/control.hpp"
#include "core/diagnostics.hpp"
#include "core/dynamics.hpp"
#include "core/lyapunov.hpp"
#include "core/potential.hpp"
#include "core/quadrature.hpp"
#include "core/threads.hpp"
#include "oracles.hpp"

using namespace slg;

namespace {

struct Harness {
    int failures = 0;
    void run(int id, const std::string& title, const std::function<bool(std::string&)>& fn,
             double budget_seconds = 0.0) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (budget_seconds > 0.0 && secs > budget_seconds) {
            ok = false;
            detail += "; over the " + std::to_string(budget_seconds) + " s budget";
        }
        std::printf("[%s] criterion %2d: %s (%s) [%.1f s]\n", ok ? "PASS" : "FAIL", id,
                    title.c_str(), detail.c_str(), secs);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

ModelPtr singular_quartic() { return make_singular_pair_1d(1.0, 4.0, 1.0, 2.0); }

std::vector<PhaseState> family_states(const PotentialModel& m, int n, std::uint64_t seed) {
    CounterRng rng(seed, 0xACC);
    std::vector<PhaseState> out;
    for (int i = 0; i < n; ++i) {
        PhaseState x;
        x.q = m.sample_sublevel(50.0, rng);
        x.p.resize(m.dim());
        for (auto& v : x.p) v = 2.0 * rng.normal();
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<Vec> column_series(const std::vector<TrajectorySummary>& trajs, int col) {
    std::vector<Vec> out;
    for (const auto& tr : trajs) {
        Vec s;
        for (long long r = 0; r < static_cast<long long>(tr.times.size()); ++r)
            s.push_back(tr.records(static_cast<int>(r), col));
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

int main() {
    Harness h;
    const double gamma = 1.0, T = 0.5;

    // 1. drift condition for b in {1.0, 1.8}
    h.run(1, "drift condition: 0 violations over 1e5 fresh stratified samples", [&](std::string& d) {
        auto m = singular_quartic();
        bool ok = true;
        for (double b : {1.0, 1.8}) {
            SelectOptions sopts;
            sopts.samples = 100000;
            const auto params = select_params(*m, gamma, T, b, sopts);
            DriftOptions dopts;
            dopts.n_samples = 100000;
            const auto rep = verify_drift(params, *m, dopts);
            ok = ok && rep.pass && rep.violations == 0;
            d += (d.empty() ? "" : "; ") + std::string("b=") + std::to_string(b) +
                 ": violations=" + std::to_string(rep.violations) +
                 ", c_hat=" + std::to_string(rep.c_hat);
        }
        return ok;
    }, 60.0);

    auto m1 = singular_quartic();
    SelectOptions sel;
    sel.samples = 100000;
    const auto params_b1 = select_params(*m1, gamma, T, 1.0, sel);

    // 2. generator cross-checks: algebraic identity route and the slow
    // semigroup finite-difference oracle
    h.run(2, "generator cross-check: identity route 1e-9, semigroup oracle 2%", [&](std::string& d) {
        double worst_rel = 0.0;
        for (long long i = 0; i < 10000; ++i) {
            CounterRng sampler(2024, 0xC2C2 + static_cast<std::uint64_t>(i));
            const auto x = sample_stratified(params_b1, *m1, static_cast<Stratum>(i % 4), sampler);
            const double a = generator_ratio(params_b1, *m1, x.q, x.p);
            const double b = generator_ratio_via_split(params_b1, *m1, x.q, x.p);
            worst_rel = std::max(worst_rel, std::abs(a - b) / std::max(std::abs(a), 1e-12));
        }
        bool ok = worst_rel <= 1e-9;
        d = "identity worst rel=" + std::to_string(worst_rel);

        CounterRng rng(77, 0);
        double worst_mc = 0.0;
        int tested = 0;
        while (tested < 20) {
            Vec q = m1->sample_sublevel(20.0, rng);
            Vec p{1.0 + 1.5 * rng.uniform()};
            const double closed = generator_ratio(params_b1, *m1, q, p);
            if (std::abs(closed) < 0.1) continue;  // avoid zero-crossing states
            const double fd = testing::semigroup_ratio_fd(*m1, params_b1, {q, p}, 1e-5, 5000000,
                                                          900 + tested);
            worst_mc = std::max(worst_mc, std::abs(fd - closed) / std::abs(closed));
            ++tested;
        }
        ok = ok && worst_mc <= 0.02;
        d += ", oracle worst rel=" + std::to_string(worst_mc) + " over 20 states x 1e7 samples";
        return ok;
    }, 600.0);

    // 3 & 4. L H identity and Liouville conservation on all three families
    std::vector<std::pair<std::string, ModelPtr>> families;
    families.emplace_back("poly_confine", make_poly_confine(1.0, 4.0, 1, 2));
    families.emplace_back("singular_pair", singular_quartic());
    families.emplace_back("lennard_jones", make_interacting(1.0, 2.0, 1.0, 12.0, 1.0, 2, 2));

    h.run(3, "L H = -gamma |p|^2 + gamma T N d to 1e-10 on all families", [&](std::string& d) {
        double worst = 0.0;
        for (auto& [name, m] : families) {
            const double nd = m->dim();
            for (const auto& x : family_states(*m, 10000, 31)) {
                const auto sg =
                    apply_split_generator(*m, gamma, T, hamiltonian_derivatives(*m, x.q, x.p),
                                          x.q, x.p);
                const double expect = -gamma * nrm2_sq(x.p) + gamma * T * nd;
                worst = std::max(worst, std::abs(sg.total - expect) / (1.0 + std::abs(expect)));
            }
        }
        d = "worst rel=" + std::to_string(worst);
        return worst <= 1e-10;
    });

    h.run(4, "Liouville conservation: H-part of L H vanishes", [&](std::string& d) {
        double worst = 0.0;
        for (auto& [name, m] : families) {
            for (const auto& x : family_states(*m, 10000, 41)) {
                const auto sg =
                    apply_split_generator(*m, gamma, T, hamiltonian_derivatives(*m, x.q, x.p),
                                          x.q, x.p);
                const Vec g = m->gradient(x.q);
                worst = std::max(worst,
                                 std::abs(sg.h_part) / (1.0 + nrm2(x.p) * nrm2(g)));
            }
        }
        d = "worst scaled residual=" + std::to_string(worst);
        return worst <= 1e-10;
    });

    // 5. Gibbs convergence of the long singular run
    h.run(5, "gibbs convergence: TV <= 0.05 over 100 bins, momentum KS under 1%", [&](std::string& d) {
        auto m = singular_quartic();
        SdeConfig sde;
        sde.gamma = gamma;
        sde.temperature = T;
        sde.dt = 1e-3;
        sde.n_steps = 10000000;
        sde.sample_every = 100;
        sde.seed = 5;
        std::vector<Observable> obs{
            {"q1", [](const PotentialModel&, const PhaseState& x) { return x.q[0]; }},
            {"p1", [](const PotentialModel&, const PhaseState& x) { return x.p[0]; }}};
        const auto tr = simulate(*m, sde, {{1.0}, {0.0}}, obs);
        if (tr.exit_flag) {
            d = "trajectory exited";
            return false;
        }
        Vec qs, ps;
        for (long long r = 0; r < static_cast<long long>(tr.times.size()); ++r) {
            qs.push_back(tr.records(static_cast<int>(r), 3));
            ps.push_back(tr.records(static_cast<int>(r), 4));
        }
        const auto ref = gibbs_reference(*m, T);
        const auto hd = histogram_distance(qs, ref, 100);
        const double ksp = ks_statistic_gaussian(ps, T);
        const double crit = ks_critical_value(0.01, static_cast<long long>(ps.size()));
        d = "tv=" + std::to_string(hd.tv) + ", ks_p=" + std::to_string(ksp) +
            " (crit=" + std::to_string(crit) + ")";
        return hd.tv <= 0.05 && ksp < crit;
    }, 300.0);

    // 6. equipartition for the 2-particle planar LJ system
    h.run(6, "equipartition: stationary mean |p|^2 = T N d within 3 SE", [&](std::string& d) {
        auto m = make_interacting(1.0, 2.0, 1.0, 12.0, 1.0, 2, 2);
        SdeConfig sde;
        sde.gamma = gamma;
        sde.temperature = T;
        sde.dt = 1e-3;
        sde.n_steps = 200000;
        sde.sample_every = 200;
        sde.seed = 6;
        const auto trajs = ensemble(*m, sde, {{m->anchor(), Vec(4, 0.0)}}, 64);
        const auto rep = equipartition(column_series(trajs, 2), T, 2, 2);
        d = "mean=" + std::to_string(rep.mean_p2) + ", target=" + std::to_string(rep.target) +
            ", z=" + std::to_string(rep.z);
        return rep.pass;
    }, 300.0);

    // 7. exponential decorrelation
    h.run(7, "decay fits: OU recovers gamma +-10%; singular H has eta>0, r2>=0.9", [&](std::string& d) {
        auto free_model = make_poly_confine(0.0, 2.0, 1, 1);
        SdeConfig sde;
        sde.gamma = gamma;
        sde.temperature = 1.0;
        sde.dt = 1e-3;
        sde.n_steps = 200000;
        sde.sample_every = 100;
        sde.seed = 7;
        std::vector<Observable> obs{
            {"p1", [](const PotentialModel&, const PhaseState& x) { return x.p[0]; }}};
        const auto ou = ensemble(*free_model, sde, {{{0.0}, {1.0}}}, 8, obs);
        const auto fit_ou = decay_fit(column_series(ou, 3), 0.1);
        bool ok = fit_ou.reliable && std::abs(fit_ou.eta_hat - gamma) <= 0.1 * gamma;
        d = "ou eta=" + std::to_string(fit_ou.eta_hat);

        auto m = singular_quartic();
        SdeConfig sde2;
        sde2.gamma = gamma;
        sde2.temperature = T;
        sde2.dt = 1e-3;
        sde2.n_steps = 500000;
        sde2.sample_every = 100;
        sde2.seed = 8;
        const auto trajs = ensemble(*m, sde2, {{{1.0}, {0.0}}}, 4);
        const auto fit_h = decay_fit(column_series(trajs, 0), 0.1);
        ok = ok && fit_h.eta_hat > 0.0 && fit_h.r_squared >= 0.9;
        d += "; H eta=" + std::to_string(fit_h.eta_hat) +
             ", r2=" + std::to_string(fit_h.r_squared);
        return ok;
    });

    // 8. semigroup moment bound and the weaker H bound
    h.run(8, "moment bounds: E W and E H under their lines at every recorded t", [&](std::string& d) {
        auto m = singular_quartic();
        DriftOptions dopts;
        dopts.n_samples = 100000;
        const auto drift = verify_drift(params_b1, *m, dopts);
        SdeConfig sde;
        sde.gamma = gamma;
        sde.temperature = T;
        sde.dt = 1e-3;
        sde.n_steps = 2000;
        sde.sample_every = 100;
        sde.seed = 88;
        const PhaseState x0{{1.0}, {0.0}};
        const auto trajs = ensemble(*m, sde, {x0}, 200, {}, &params_b1);
        const int lw_col = 3;
        const auto rep = moment_bound_check(
            trajs[0].times, column_series(trajs, lw_col), column_series(trajs, 0),
            eval_log_w(params_b1, *m, x0.q, x0.p), hamiltonian(*m, x0.q, x0.p), drift.c_hat,
            drift.log_k_hat, gamma, T, 1, 1);
        d = std::string("W bound ") + (rep.pass_w ? "holds" : "fails") + ", H bound " +
            (rep.pass_h ? "holds" : "fails") + " at " + std::to_string(rep.t.size()) + " times";
        return rep.pass_w && rep.pass_h;
    });

    // 9. controllability
    h.run(9, "reachability: stationary, 1d translation, planar LJ swap", [&](std::string& d) {
        auto singular = make_singular_pair_1d(1.0, 2.0, 1.0, 1.0);
        const PhaseState fixed{{1.3}, {0.0}};
        const auto r1 = verify_reachability(*singular, fixed, fixed, 1.0, gamma, T);
        bool ok = r1.pass && r1.endpoint_error <= 1e-10;

        const auto r2 =
            verify_reachability(*singular, {{1.0}, {0.0}}, {{2.0}, {0.5}}, 2.0, gamma, T);
        ok = ok && r2.pass;

        auto lj = make_interacting(1.0, 2.0, 1.0, 12.0, 1.0, 2, 2);
        const PhaseState a{{-0.6, 0.0, 0.6, 0.0}, Vec(4, 0.0)};
        const PhaseState b{{0.6, 0.0, -0.6, 0.0}, Vec(4, 0.0)};
        const auto r3 = verify_reachability(*lj, a, b, 5.0, gamma, T);
        ok = ok && r3.pass;
        d = "errors: " + std::to_string(r1.endpoint_error) + ", " +
            std::to_string(r2.endpoint_error) + ", " + std::to_string(r3.endpoint_error);
        return ok;
    }, 30.0);

    // 10. admissibility probes and the gradient lower bound
    h.run(10, "admissibility: families pass, |q|^1.5 fails, gradient bound has finite D", [&](std::string& d) {
        ProbeOptions popts;
        popts.seed = 10;
        bool ok = true;
        for (auto& [name, m] : families) {
            const auto rep =
                probe_admissibility(*m, T, default_probe_sequences(*m, popts), popts);
            ok = ok && rep.pass;
            if (!rep.pass) d += name + " failed; ";
        }

        auto m32 = make_poly_confine(1.0, 1.5, 1, 1);
        std::vector<ProbeSequence> seqs;
        ProbeSequence toward_zero;
        toward_zero.label = "ratio_test";
        for (int k = 0; k < 12; ++k) toward_zero.points.push_back(Vec{0.5 * std::pow(2.0, -k)});
        seqs.push_back(toward_zero);
        const auto fail_rep = probe_admissibility(*m32, T, seqs, popts);
        ok = ok && !fail_rep.pass;

        auto lj = make_interacting(1.0, 2.0, 1.0, 12.0, 1.0, 2, 2);
        const auto bound = verify_gradient_lower_bound(*lj, 100000, 101);
        ok = ok && bound.pass && bound.D <= 1e6;
        d += "|q|^1.5 verdict=" + std::string(fail_rep.pass ? "pass" : "fail") +
             ", bound D=" + std::to_string(bound.D);
        return ok;
    });

    // 11. (l1) tail: log W / (b H) -> 1 along escape sequences
    h.run(11, "tail asymptotics: log W/(bH) within 2% at H ~ 1e3", [&](std::string& d) {
        auto m = singular_quartic();
        CounterRng rng(11, 0);
        bool ok = true;
        double last = 0.0;
        for (auto route : {EscapeRoute::Outward, EscapeRoute::Collapse}) {
            const Vec q = m->escape_config(route, 999.0, rng);
            const Vec p{std::sqrt(2.0)};
            const double ham = hamiltonian(*m, q, p);
            last = eval_log_w(params_b1, *m, q, p) / (params_b1.b * ham);
            ok = ok && last >= 0.98 && last <= 1.02;
        }
        d = "last ratio=" + std::to_string(last);
        return ok;
    });

    // 12. L1(mu) sharpness of b < 1/T under nested truncations
    h.run(12, "integral of W dmu: stabilizes at b=0.9/T, grows at b=1.1/T", [&](std::string& d) {
        auto m = singular_quartic();
        const auto params = select_params(*m, gamma, T, 0.9 / T, sel);
        auto log_integral = [&](double b, double u_cap) {
            Vec lo, hi;
            m->sublevel_box(u_cap, lo, hi);
            const double p_max = std::sqrt(2.0 * u_cap);
            return log_integrate_panels_2d(
                [&](double q, double p) {
                    Vec qq{q}, pp{p};
                    if (!m->is_in_domain(qq)) return -std::numeric_limits<double>::infinity();
                    const double u = m->value(qq);
                    if (!std::isfinite(u)) return -std::numeric_limits<double>::infinity();
                    return (b - 1.0 / T) * (0.5 * p * p + u) + eval_psi(params, *m, qq, pp);
                },
                lo[0], hi[0], -p_max, p_max, 220, 220);
        };
        bool ok = true;
        for (double b : {0.9 / T, 1.1 / T}) {
            const double i1 = log_integral(b, 15.0);
            const double i2 = log_integral(b, 30.0);
            const double i3 = log_integral(b, 60.0);
            const double d1 = i2 - i1, d2 = i3 - i2;
            if (b < 1.0 / T)
                ok = ok && d2 < d1 && d2 < 0.05;
            else
                ok = ok && d2 > d1 && d2 > 1.0;
            d += (d.empty() ? "" : "; ") + std::string("b=") + std::to_string(b) +
                 ": increments " + std::to_string(d1) + " -> " + std::to_string(d2);
        }
        return ok;
    });

    std::printf("%d of 12 criteria failed\n", h.failures);
    return h.failures;
}
