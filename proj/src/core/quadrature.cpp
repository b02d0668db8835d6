#include "core/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace slg {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1,1] (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEstimate {
    double value;
    double error;
};

PanelEstimate gk15(const Fn1& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        result_kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
    }
    const double value = result_kronrod * h;
    const double error = std::abs((result_kronrod - result_gauss) * h);
    return {value, error};
}

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace

QuadResult integrate(const Fn1& f, double a, double b, double rel_tol, double abs_tol,
                     int max_intervals) {
    QuadResult out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }
    std::priority_queue<Interval> heap;
    auto first = gk15(f, a, b);
    out.evals = 15;
    heap.push({a, b, first.value, first.error});
    double total = first.value;
    double total_err = first.error;
    int n = 1;
    while (n < max_intervals) {
        const double tol = std::max(abs_tol, rel_tol * std::abs(total));
        if (total_err <= tol) break;
        Interval worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        auto left = gk15(f, worst.a, m);
        auto right = gk15(f, m, worst.b);
        out.evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push({worst.a, m, left.value, left.error});
        heap.push({m, worst.b, right.value, right.error});
        ++n;
    }
    out.value = total;
    out.abs_error = total_err;
    out.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
    return out;
}

QuadResult integrate_box(const std::function<double(Span)>& f, Span lo, Span hi, double rel_tol,
                         int max_intervals) {
    const std::size_t dim = lo.size();
    QuadResult out;
    if (dim == 1) {
        auto r = integrate([&](double x) { return f(Span(&x, 1)); }, lo[0], hi[0], rel_tol,
                           1e-300, max_intervals);
        return r;
    }
    // Peel off the first coordinate, recurse on the rest.
    long long evals = 0;
    bool inner_ok = true;
    auto outer = [&](double x) {
        Vec sub_lo(lo.begin() + 1, lo.end());
        Vec sub_hi(hi.begin() + 1, hi.end());
        auto inner = integrate_box(
            [&](Span rest) {
                Vec full(dim);
                full[0] = x;
                std::copy(rest.begin(), rest.end(), full.begin() + 1);
                return f(full);
            },
            sub_lo, sub_hi, rel_tol * 0.5, max_intervals);
        evals += inner.evals;
        inner_ok = inner_ok && inner.converged;
        return inner.value;
    };
    auto r = integrate(outer, lo[0], hi[0], rel_tol, 1e-300, max_intervals);
    r.evals += evals;
    r.converged = r.converged && inner_ok;
    return r;
}

double log_integrate_panels(const std::function<double(double)>& logf, double a, double b,
                            int n_panels) {
    const double width = (b - a) / n_panels;
    double acc = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_panels; ++k) {
        const double pa = a + k * width;
        const double c = pa + 0.5 * width;
        const double h = 0.5 * width;
        const double log_h = std::log(h);
        acc = log_add(acc, logf(c) + std::log(kWgk[7]) + log_h);
        for (int j = 0; j < 7; ++j) {
            const double x = h * kXgk[j];
            const double lw = std::log(kWgk[j]) + log_h;
            acc = log_add(acc, logf(c - x) + lw);
            acc = log_add(acc, logf(c + x) + lw);
        }
    }
    return acc;
}

double log_integrate_panels_2d(const std::function<double(double, double)>& logf, double ax,
                               double bx, double ay, double by, int nx, int ny) {
    auto outer = [&](double x) {
        return log_integrate_panels([&](double y) { return logf(x, y); }, ay, by, ny);
    };
    return log_integrate_panels(outer, ax, bx, nx);
}

}  // namespace slg
