#include <doctest.h>

#include <cmath>

#include "core/ode.hpp"
#include "core/quadrature.hpp"
#include "core/smoothstep.hpp"
#include "core/vec.hpp"

using namespace slg;

TEST_CASE("gauss-kronrod panel is exact on polynomials and tight on exp") {
    // wrong tabulated nodes/weights would break both checks immediately
    auto r = integrate([](double x) { return std::pow(x, 10); }, 0.0, 1.0, 1e-13);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 11.0).epsilon(1e-13));

    auto e = integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-13);
    CHECK(e.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));

    auto g = integrate([](double x) { return std::exp(-0.5 * x * x); }, -12.0, 12.0, 1e-12);
    CHECK(g.value == doctest::Approx(std::sqrt(2.0 * 3.14159265358979324)).epsilon(1e-11));
}

TEST_CASE("iterated box quadrature integrates a 2D gaussian") {
    Vec lo{-10.0, -10.0}, hi{10.0, 10.0};
    auto r = integrate_box(
        [](Span q) { return std::exp(-0.5 * (q[0] * q[0] + q[1] * q[1])); }, lo, hi, 1e-9);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0 * 3.14159265358979324).epsilon(1e-8));
}

TEST_CASE("log-space panels agree with the linear result") {
    const double lv = log_integrate_panels(
        [](double x) { return -0.5 * x * x; }, -10.0, 10.0, 64);
    CHECK(lv == doctest::Approx(0.5 * std::log(2.0 * 3.14159265358979324)).epsilon(1e-10));

    // a case the linear scale cannot represent
    const double lbig = log_integrate_panels([](double x) { return 800.0 + x; }, 0.0, 1.0, 16);
    CHECK(lbig == doctest::Approx(800.0 + std::log(std::exp(1.0) - 1.0)).epsilon(1e-10));
}

TEST_CASE("rk45 integrates linear decay and the harmonic oscillator") {
    auto decay = rk45([](double, Span y, std::span<double> dy) { dy[0] = -2.0 * y[0]; }, 0.0,
                      3.0, Vec{1.0}, 1e-12, 1e-14);
    CHECK(decay.ok);
    CHECK(decay.y[0] == doctest::Approx(std::exp(-6.0)).epsilon(1e-9));

    auto osc = rk45(
        [](double, Span y, std::span<double> dy) {
            dy[0] = y[1];
            dy[1] = -y[0];
        },
        0.0, 10.0, Vec{1.0, 0.0}, 1e-12, 1e-14);
    CHECK(osc.ok);
    CHECK(osc.y[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-8));
    CHECK(osc.y[1] == doctest::Approx(-std::sin(10.0)).epsilon(1e-8));
}

TEST_CASE("quintic smoothstep obeys the cutoff contract") {
    CHECK(Smoothstep::value(-0.5) == 0.0);
    CHECK(Smoothstep::value(0.0) == 0.0);
    CHECK(Smoothstep::value(1.0) == 1.0);
    CHECK(Smoothstep::value(2.0) == 1.0);
    CHECK(Smoothstep::value(0.5) == doctest::Approx(0.5));

    // slope bound 15/8, attained at the midpoint
    double max_slope = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double x = k / 1000.0;
        max_slope = std::max(max_slope, Smoothstep::deriv(x));
        CHECK(Smoothstep::value(x) >= 0.0);
        CHECK(Smoothstep::value(x) <= 1.0);
    }
    CHECK(max_slope == doctest::Approx(15.0 / 8.0).epsilon(1e-4));
    CHECK(max_slope <= 2.0);

    // C^2 at the edges: derivatives vanish from inside
    CHECK(Smoothstep::deriv(1e-9) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(Smoothstep::deriv2(1e-6) == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(Smoothstep::deriv(1.0 - 1e-9) == doctest::Approx(0.0).epsilon(1e-12));

    // finite differences confirm deriv and deriv2
    const double h = 1e-6;
    for (double x : {0.2, 0.4, 0.6, 0.8}) {
        const double fd1 = (Smoothstep::value(x + h) - Smoothstep::value(x - h)) / (2 * h);
        const double fd2 = (Smoothstep::deriv(x + h) - Smoothstep::deriv(x - h)) / (2 * h);
        CHECK(fd1 == doctest::Approx(Smoothstep::deriv(x)).epsilon(1e-6));
        CHECK(fd2 == doctest::Approx(Smoothstep::deriv2(x)).epsilon(1e-5));
    }
}
