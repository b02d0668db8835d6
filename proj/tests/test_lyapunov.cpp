#include <doctest.h>

#include <cmath>

#include "core/lyapunov.hpp"
#include "core/potential.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace slg;
using slg::testing::semigroup_ratio_fd;

namespace {

LyapunovParams handmade_params(double b, double gamma, double T, double r1, double r2) {
    LyapunovParams p;
    p.b = b;
    p.gamma = gamma;
    p.temperature = T;
    p.n = 1;
    p.d = 1;
    p.kappa = 3.0 * gamma * (1.0 + 1e-3);
    p.C = 1.0;
    p.r1 = r1;
    p.r2 = r2;
    return p;
}

}  // namespace

TEST_CASE("hamiltonian basics") {
    auto m = make_singular_pair_1d(1.0, 2.0, 1.0, 1.0);
    CHECK(hamiltonian(*m, Vec{1.0}, Vec{0.0}) == doctest::Approx(2.0));
    CHECK(hamiltonian(*m, Vec{1.0}, Vec{2.0}) == doctest::Approx(4.0));
    CHECK_THROWS_AS(hamiltonian(*m, Vec{-1.0}, Vec{0.0}), DomainError);

    CounterRng rng(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const Vec q = m->sample_sublevel(40.0, rng);
        const Vec p{3.0 * rng.normal()};
        CHECK(hamiltonian(*m, q, p) >= m->value(q));
    }
}

TEST_CASE("psi is zero below r1, follows the formula above r2, linear in p") {
    auto m = make_singular_pair_1d(1.0, 2.0, 1.0, 1.0);
    auto params = handmade_params(0.5, 1.0, 1.0, 10.0, 50.0);
    CounterRng rng(2, 0);

    for (int i = 0; i < 200; ++i) {
        const Vec q = m->sample_sublevel(9.9, rng);
        CHECK(eval_psi(params, *m, q, Vec{rng.normal()}) == 0.0);
    }
    for (double u : {60.0, 300.0, 4000.0}) {
        const Vec q = m->escape_config(EscapeRoute::Outward, u, rng);
        Vec g(1);
        m->gradient(q, g);
        const double p = 2.0;
        CHECK(eval_psi(params, *m, q, Vec{p}) ==
              doctest::Approx(params.kappa * p * g[0] / (g[0] * g[0])).epsilon(1e-12));
        CHECK(eval_psi(params, *m, q, Vec{0.0}) == 0.0);
        // linear in p
        CHECK(eval_psi(params, *m, q, Vec{3.0 * p}) ==
              doctest::Approx(3.0 * eval_psi(params, *m, q, Vec{p})).epsilon(1e-12));
    }
}

TEST_CASE("psi flags a vanishing gradient inside the active region") {
    auto m = make_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    // minimizer has U ~ 1.9 > r1 = 0.5 and grad U = 0 there
    auto params = handmade_params(1.0, 1.0, 0.5, 0.5, 5.0);
    const Vec q_min = m->anchor();
    CHECK_THROWS_AS(eval_psi(params, *m, q_min, Vec{1.0}), ConsistencyError);
}

TEST_CASE("W = exp(b H + psi): value, positivity, overflow sentinel") {
    auto m = make_singular_pair_1d(1.0, 2.0, 1.0, 1.0);
    auto params = handmade_params(0.5, 1.0, 1.0, 10.0, 50.0);

    // U <= r1 region with H = 4: W = e^2
    const Vec q{1.0};  // U = 2
    const Vec p{2.0};  // H = 4
    CHECK(eval_w(params, *m, q, p) == doctest::Approx(7.38905609893065).epsilon(1e-12));

    CounterRng rng(3, 0);
    for (int i = 0; i < 10000; ++i) {
        const Vec qq = m->sample_sublevel(45.0, rng);
        const Vec pp{3.0 * rng.normal()};
        const double lw = eval_log_w(params, *m, qq, pp);
        CHECK(std::isfinite(lw));
        CHECK(eval_w(params, *m, qq, pp) > 0.0);
        // log W - b H = psi exactly (within round-off)
        const double h = hamiltonian(*m, qq, pp);
        const double psi = eval_psi(params, *m, qq, pp);
        CHECK(lw - params.b * h ==
              doctest::Approx(psi).epsilon(1e-12).scale(1.0 + std::abs(lw)));
    }

    bool overflow = false;
    const Vec q_big = m->escape_config(EscapeRoute::Outward, 2000.0, rng);
    const double w = eval_w(params, *m, q_big, Vec{0.0}, &overflow);
    CHECK(overflow);
    CHECK(w == std::numeric_limits<double>::infinity());
    CHECK(std::isfinite(eval_log_w(params, *m, q_big, Vec{0.0})));
}

TEST_CASE("generator ratio on the quiet region is the exact quadratic law") {
    auto m = make_singular_pair_1d(1.0, 2.0, 1.0, 1.0);
    // d = N = 1, gamma = 1, T = 1, b = 0.5, p = 1:
    //   -b g (1 - bT) p^2 + g b T N d = -0.25 + 0.5 = 0.25
    auto params = handmade_params(0.5, 1.0, 1.0, 10.0, 50.0);
    CHECK(generator_ratio(params, *m, Vec{1.0}, Vec{1.0}) == doctest::Approx(0.25).epsilon(1e-14));

    CounterRng rng(4, 0);
    for (int i = 0; i < 2000; ++i) {
        const Vec q = m->sample_sublevel(9.9, rng);
        const Vec p{4.0 * rng.normal()};
        const double expect = -params.b * params.gamma * (1.0 - params.b * params.temperature) *
                                  p[0] * p[0] +
                              params.gamma * params.b * params.temperature;
        CHECK(generator_ratio(params, *m, q, p) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("split generator: L H, Liouville conservation, A psi = -kappa") {
    auto m = make_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    const double gamma = 1.3, T = 0.7;
    CounterRng rng(5, 0);
    for (int i = 0; i < 10000; ++i) {
        const Vec q = m->sample_sublevel(50.0, rng);
        const Vec p{3.0 * rng.normal()};
        const auto fh = hamiltonian_derivatives(*m, q, p);
        const auto sg = apply_split_generator(*m, gamma, T, fh, q, p);
        const double expect = -gamma * p[0] * p[0] + gamma * T;  // N d = 1
        CHECK(sg.total == doctest::Approx(expect).epsilon(1e-10));
        Vec g(1);
        m->gradient(q, g);
        CHECK(std::abs(sg.h_part) <= 1e-10 * (1.0 + std::abs(p[0]) * std::abs(g[0])));
    }

    auto params = handmade_params(1.0, gamma, T, 10.0, 40.0);
    for (double u : {50.0, 400.0, 9e3}) {
        const Vec q = m->escape_config(EscapeRoute::Collapse, u, rng);
        const Vec p{rng.normal()};
        const auto fpsi = psi_derivatives(params, *m, q, p);
        const auto sg = apply_split_generator(*m, gamma, T, fpsi, q, p);
        CHECK(sg.a_part == doctest::Approx(-params.kappa).epsilon(1e-12));
    }
}

TEST_CASE("closed-form ratio agrees with the exp-identity route to 1e-9") {
    auto singular = make_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    auto params = select_params(*singular, 1.0, 0.5, 1.0, SelectOptions{.samples = 20000});
    CounterRng rng(6, 0);
    for (long long i = 0; i < 10000; ++i) {
        CounterRng sampler(6, 0xAB00 + static_cast<std::uint64_t>(i));
        const auto x = sample_stratified(params, *singular, static_cast<Stratum>(i % 4), sampler);
        const double r1 = generator_ratio(params, *singular, x.q, x.p);
        const double r2 = generator_ratio_via_split(params, *singular, x.q, x.p);
        CHECK(r1 == doctest::Approx(r2).epsilon(1e-9));
    }
}

TEST_CASE("select_params honors the proof's inequalities") {
    auto m = make_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    const double gamma = 1.0, T = 0.5;
    for (double b : {1.0, 1.8}) {  // 1.8 = 0.9 / T
        SelectOptions opts;
        opts.samples = 20000;
        const auto params = select_params(*m, gamma, T, b, opts);
        CHECK(params.kappa > 3.0 * gamma);
        CHECK(params.r2 > params.r1);
        CHECK(params.C > 4.0 * std::abs(2.0 * b * T - 1.0) * params.kappa / (b * (1.0 - b * T)));

        // fresh re-verification of the sampled region conditions
        const double bound_grad_g = params.drift_coeff() / (8.0 * params.kappa);
        const double g2_coeff =
            0.5 * params.kappa * params.C * std::abs(2.0 * b * T - 1.0) * gamma +
            params.kappa * params.kappa * gamma * T;
        CounterRng rng(99, 0);
        Mat h(1);
        for (int i = 0; i < 3000; ++i) {
            const double u = 0.5 * params.r1 * std::pow(10.0, 6.0 * rng.uniform());
            const auto route = i % 2 ? EscapeRoute::Collapse : EscapeRoute::Outward;
            const Vec q = m->escape_config(route, u, rng);
            Vec g(1);
            m->gradient(q, g);
            const double s = g[0] * g[0];
            CHECK(std::sqrt(s) >= 1.0);
            CHECK(g2_coeff / s <= gamma * b * T + 1e-12);
            m->hessian(q, h);
            // 1D: |grad G| = |d/dq (1/U')| = |U''| / U'^2
            CHECK(std::abs(h(0, 0)) / s < bound_grad_g);
        }

        // cutoff slope bound implied by the r2 sizing
        CHECK(params.cutoff().deriv_bound() <= params.drift_coeff() / (8.0 * params.kappa));
    }
    CHECK_THROWS_AS(select_params(*m, gamma, T, 2.5), ConfigError);  // b >= 1/T

    auto quartic = make_poly_confine(1.0, 4.0, 1, 1);
    const auto params = select_params(*quartic, 1.0, 1.0, 0.5, SelectOptions{.samples = 5000});
    CHECK(params.r1 > 0.0);
}

TEST_CASE("verify_drift finds no violations for the singular quartic family") {
    auto m = make_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    const auto params = select_params(*m, 1.0, 0.5, 1.0, SelectOptions{.samples = 20000});
    DriftOptions opts;
    opts.n_samples = 20000;
    const auto rep = verify_drift(params, *m, opts);
    CHECK(rep.pass);
    CHECK(rep.violations == 0);
    CHECK(rep.c_hat > 0.0);
    CHECK(rep.worst_margin >= 0.0);

    // far-region bounds from the proof, checked pointwise
    const double nd = 1.0;
    CounterRng rng(7, 0);
    for (int i = 0; i < 2000; ++i) {
        CounterRng sampler(17, 0xCC00 + static_cast<std::uint64_t>(i));
        const auto x = sample_stratified(params, *m, Stratum::LargeP, sampler);
        if (nrm2_sq(x.p) > params.p2_cap())
            CHECK(generator_ratio(params, *m, x.q, x.p) < -params.gamma * nd);
    }
    for (int i = 0; i < 2000; ++i) {
        CounterRng sampler(18, 0xDD00 + static_cast<std::uint64_t>(i));
        const auto x = sample_stratified(params, *m, Stratum::HighU, sampler);
        if (m->value(x.q) >= params.r2) {
            const double bound = -params.kappa + 2.0 * params.gamma * params.b *
                                                     params.temperature * nd;
            CHECK(generator_ratio(params, *m, x.q, x.p) <= bound + 1e-9);
        }
    }
}

TEST_CASE("closed form matches the semigroup finite-difference oracle") {
    auto m = make_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    const auto params = select_params(*m, 1.0, 0.5, 1.0, SelectOptions{.samples = 10000});
    CounterRng rng(8, 0);
    for (int s = 0; s < 3; ++s) {
        const Vec q = m->sample_sublevel(20.0, rng);
        const Vec p{1.0 + rng.uniform()};
        const double closed = generator_ratio(params, *m, q, p);
        const double fd = semigroup_ratio_fd(*m, params, {q, p}, 1e-5, 1000000, 100 + s);
        CHECK(fd == doctest::Approx(closed).epsilon(0.05));
    }
}

TEST_CASE("log W / (b H) tends to 1 along escape sequences") {
    auto m = make_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    const auto params = select_params(*m, 1.0, 0.5, 1.0, SelectOptions{.samples = 10000});
    CounterRng rng(9, 0);
    for (auto route : {EscapeRoute::Outward, EscapeRoute::Collapse}) {
        double h_target = 30.0;
        double last_ratio = 0.0;
        while (h_target < 1e3) h_target *= 2.0;  // only the H ~ 1e3 endpoint matters
        const Vec q = m->escape_config(route, h_target - 1.0, rng);
        const Vec p{std::sqrt(2.0)};  // |p|^2/2 = 1
        const double h = hamiltonian(*m, q, p);
        last_ratio = eval_log_w(params, *m, q, p) / (params.b * h);
        CHECK(last_ratio >= 0.98);
        CHECK(last_ratio <= 1.02);
    }
}

TEST_CASE("truncated quadrature of W dmu stabilizes iff b < 1/T") {
    auto m = make_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    const double T = 0.5;
    const auto params = select_params(*m, 1.0, T, 0.9 / T, SelectOptions{.samples = 10000});

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
                const double ham = 0.5 * p * p + u;
                return (b - 1.0 / T) * ham + eval_psi(params, *m, qq, pp);
            },
            lo[0], hi[0], -p_max, p_max, 220, 220);
    };

    for (double b : {0.9 / T, 1.1 / T}) {
        const double i1 = log_integral(b, 15.0);
        const double i2 = log_integral(b, 30.0);
        const double i3 = log_integral(b, 60.0);
        const double d1 = i2 - i1, d2 = i3 - i2;
        if (b < 1.0 / T) {
            CHECK(d2 < d1);
            CHECK(d2 < 0.05);  // stabilized
        } else {
            CHECK(d2 > d1);
            CHECK(d2 > 1.0);  // still growing under domain growth
        }
    }
}
