#pragma once

namespace slg {

// Quintic smoothstep s(x) = x^3 (10 - 15x + 6x^2) on [0,1], clamped outside.
// C^2 everywhere; max |s'| = 15/8 at x = 1/2.
struct Smoothstep {
    static double value(double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    }
    static double deriv(double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        const double y = x * (1.0 - x);
        return 30.0 * y * y;
    }
    static double deriv2(double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
    }
};

}  // namespace slg
