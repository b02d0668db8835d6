#include "core/control.hpp"

#include <algorithm>
#include <cmath>

#include "core/ode.hpp"

namespace slg {

namespace {

struct Knot {
    double s;
    Vec y, v, a;
};

// Quintic Hermite segment matching value/velocity/acceleration at both ends.
ControlPath::Segment fit_segment(const Knot& k0, const Knot& k1) {
    const int dim = static_cast<int>(k0.y.size());
    ControlPath::Segment seg;
    seg.s0 = k0.s;
    seg.s1 = k1.s;
    seg.coef = Mat(dim, 6);
    const double T = k1.s - k0.s;
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    for (int i = 0; i < dim; ++i) {
        const double y0 = k0.y[i], v0 = k0.v[i], a0 = k0.a[i];
        const double y1 = k1.y[i], v1 = k1.v[i], a1 = k1.a[i];
        const double dy = y1 - y0;
        seg.coef(i, 0) = y0;
        seg.coef(i, 1) = v0;
        seg.coef(i, 2) = 0.5 * a0;
        seg.coef(i, 3) = (20.0 * dy - (8.0 * v1 + 12.0 * v0) * T - (3.0 * a0 - a1) * T2) /
                         (2.0 * T3);
        seg.coef(i, 4) = (-30.0 * dy + (14.0 * v1 + 16.0 * v0) * T + (3.0 * a0 - 2.0 * a1) * T2) /
                         (2.0 * T4);
        seg.coef(i, 5) = (12.0 * dy - 6.0 * (v1 + v0) * T + (a1 - a0) * T2) / (2.0 * T5);
    }
    return seg;
}

}  // namespace

void ControlPath::eval(double s, std::span<double> phi, std::span<double> dphi,
                       std::span<double> ddphi) const {
    s = std::clamp(s, 0.0, t_final_);
    // segments are few; linear scan is fine
    const Segment* seg = &segments_.back();
    for (const auto& cand : segments_)
        if (s <= cand.s1) {
            seg = &cand;
            break;
        }
    const double tau = s - seg->s0;
    for (int i = 0; i < dim_; ++i) {
        const double c0 = seg->coef(i, 0), c1 = seg->coef(i, 1), c2 = seg->coef(i, 2),
                     c3 = seg->coef(i, 3), c4 = seg->coef(i, 4), c5 = seg->coef(i, 5);
        phi[i] = c0 + tau * (c1 + tau * (c2 + tau * (c3 + tau * (c4 + tau * c5))));
        dphi[i] = c1 + tau * (2 * c2 + tau * (3 * c3 + tau * (4 * c4 + tau * 5 * c5)));
        ddphi[i] = 2 * c2 + tau * (6 * c3 + tau * (12 * c4 + tau * 20 * c5));
    }
}

namespace {

bool endcap_in_domain(const PotentialModel& model, Span q, Span p, double eps, int checks) {
    Vec probe(q.begin(), q.end());
    for (int k = 0; k <= checks; ++k) {
        const double s = eps * k / checks;
        for (std::size_t i = 0; i < q.size(); ++i) probe[i] = q[i] + s * p[i];
        if (!model.is_in_domain(probe) || !std::isfinite(model.value(probe))) return false;
    }
    return true;
}

std::vector<Vec> linear_waypoints(Span ya, Span yb, int count) {
    std::vector<Vec> out;
    for (int k = 1; k <= count; ++k) {
        const double lam = static_cast<double>(k) / (count + 1);
        Vec w(ya.size());
        for (std::size_t i = 0; i < ya.size(); ++i) w[i] = ya[i] + lam * (yb[i] - ya[i]);
        out.push_back(std::move(w));
    }
    return out;
}

// Two-particle detour that interpolates the relative vector in polar form;
// the pair distance never dips below min(|r0|, |r1|).
std::vector<Vec> polar_waypoints(Span ya, Span yb, int d, int count) {
    const int dim = static_cast<int>(ya.size());
    Vec r0(d), r1(d), c0(d), c1(d);
    for (int k = 0; k < d; ++k) {
        r0[k] = ya[d + k] - ya[k];
        r1[k] = yb[d + k] - yb[k];
        c0[k] = 0.5 * (ya[k] + ya[d + k]);
        c1[k] = 0.5 * (yb[k] + yb[d + k]);
    }
    const double n0 = nrm2(r0), n1 = nrm2(r1);
    Vec u0(d), e(d);
    for (int k = 0; k < d; ++k) u0[k] = r0[k] / n0;
    double cos_full = 0.0;
    for (int k = 0; k < d; ++k) cos_full += u0[k] * r1[k] / n1;
    cos_full = std::clamp(cos_full, -1.0, 1.0);
    const double theta_full = std::acos(cos_full);
    // plane partner orthogonal to u0, in span(u0, r1) when possible
    Vec w(d);
    double wn = 0.0;
    for (int k = 0; k < d; ++k) w[k] = r1[k] / n1 - cos_full * u0[k];
    wn = nrm2(w);
    if (wn < 1e-12) {
        // antipodal or parallel: pick any perpendicular direction
        int axis = 0;
        for (int k = 1; k < d; ++k)
            if (std::abs(u0[k]) < std::abs(u0[axis])) axis = k;
        for (int k = 0; k < d; ++k) w[k] = (k == axis ? 1.0 : 0.0);
        const double proj = dot(w, u0);
        for (int k = 0; k < d; ++k) w[k] -= proj * u0[k];
        wn = nrm2(w);
    }
    for (int k = 0; k < d; ++k) e[k] = w[k] / wn;

    std::vector<Vec> out;
    for (int m = 1; m <= count; ++m) {
        const double lam = static_cast<double>(m) / (count + 1);
        const double radius = (1.0 - lam) * n0 + lam * n1;
        const double th = lam * theta_full;
        Vec way(dim);
        for (int k = 0; k < d; ++k) {
            const double rk = radius * (std::cos(th) * u0[k] + std::sin(th) * e[k]);
            const double ck = (1.0 - lam) * c0[k] + lam * c1[k];
            way[k] = ck - 0.5 * rk;
            way[d + k] = ck + 0.5 * rk;
        }
        out.push_back(std::move(way));
    }
    return out;
}

ControlPath assemble(const PhaseState& x0, const PhaseState& x1, double t, double eps,
                     const std::vector<Vec>& interior, int dim) {
    Vec zero(dim, 0.0);
    Knot start{0.0, x0.q, x0.p, zero};
    Vec ya(dim), yb(dim);
    for (int i = 0; i < dim; ++i) {
        ya[i] = x0.q[i] + eps * x0.p[i];
        yb[i] = x1.q[i] - eps * x1.p[i];
    }
    Knot ja{eps, ya, x0.p, zero};
    Knot jb{t - eps, yb, x1.p, zero};
    Knot end{t, x1.q, x1.p, zero};

    std::vector<Knot> knots{ja};
    const int m = static_cast<int>(interior.size());
    for (int k = 0; k < m; ++k) {
        const double s = eps + (t - 2.0 * eps) * (k + 1) / (m + 1);
        knots.push_back({s, interior[k], zero, zero});
    }
    knots.push_back(jb);
    // Catmull-Rom velocities at interior knots
    for (int k = 1; k + 1 < static_cast<int>(knots.size()); ++k) {
        const double ds = knots[k + 1].s - knots[k - 1].s;
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = (knots[k + 1].y[i] - knots[k - 1].y[i]) / ds;
        knots[k].v = std::move(v);
    }

    std::vector<ControlPath::Segment> segs;
    segs.push_back(fit_segment(start, knots.front()));
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
        segs.push_back(fit_segment(knots[k], knots[k + 1]));
    segs.push_back(fit_segment(knots.back(), end));
    return ControlPath(std::move(segs), t, eps, dim);
}

bool path_valid(const PotentialModel& model, const ControlPath& path, int grid, double dist_floor,
                double* worst_dist = nullptr) {
    const int dim = path.dim();
    Vec phi(dim), dphi(dim), ddphi(dim);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= grid; ++k) {
        const double s = path.t_final() * k / grid;
        path.eval(s, phi, dphi, ddphi);
        if (!model.is_in_domain(phi) || !std::isfinite(model.value(phi))) return false;
        if (dist_floor > 0.0) worst = std::min(worst, model.min_pair_distance(phi));
    }
    if (worst_dist) *worst_dist = worst;
    return !(dist_floor > 0.0) || worst >= dist_floor;
}

}  // namespace

ControlPath build_path(const PotentialModel& model, const PhaseState& x0, const PhaseState& x1,
                       double t, const std::vector<Vec>& waypoints, const BuildOptions& opts) {
    const int dim = model.dim();
    if (t <= 0.0) throw ConfigError("build_path: t must be > 0");
    if (static_cast<int>(x0.q.size()) != dim || static_cast<int>(x1.q.size()) != dim ||
        static_cast<int>(x0.p.size()) != dim || static_cast<int>(x1.p.size()) != dim)
        throw ConfigError("build_path: endpoint dimension mismatch");
    if (!model.is_in_domain(x0.q)) throw DomainError("build_path: x0 outside X");
    if (!model.is_in_domain(x1.q)) throw DomainError("build_path: x1 outside X");
    if (!model.same_component(x0.q, x1.q))
        throw DomainError("build_path: endpoints lie in different connected components");

    // shrink the endcaps until both stay inside O
    double eps = t / 10.0;
    const double eps_min = t * std::pow(2.0, -20);
    while (eps >= eps_min) {
        Vec back_p(dim);
        for (int i = 0; i < dim; ++i) back_p[i] = -x1.p[i];
        if (endcap_in_domain(model, x0.q, x0.p, eps, 64) &&
            endcap_in_domain(model, x1.q, back_p, eps, 64))
            break;
        eps *= 0.5;
    }
    if (eps < eps_min) throw PathError("build_path: endcaps leave O for every eps >= t*2^-20");

    Vec ya(dim), yb(dim);
    for (int i = 0; i < dim; ++i) {
        ya[i] = x0.q[i] + eps * x0.p[i];
        yb[i] = x1.q[i] - eps * x1.p[i];
    }

    const bool user_waypoints = !waypoints.empty();
    const double dist_floor =
        model.has_pair_terms() && !user_waypoints
            ? 0.5 * std::min(model.min_pair_distance(x0.q), model.min_pair_distance(x1.q))
            : 0.0;

    std::vector<std::vector<Vec>> candidates;
    if (user_waypoints) {
        candidates.push_back(waypoints);
    } else {
        candidates.push_back(linear_waypoints(ya, yb, 3));
        if (model.has_pair_terms() && model.particles() == 2 && model.space_dim() >= 2)
            candidates.push_back(polar_waypoints(ya, yb, model.space_dim(), 5));
        CounterRng rng(opts.seed, 0xC0121D02);
        double span = 0.0;
        for (int i = 0; i < dim; ++i) span = std::max(span, std::abs(yb[i] - ya[i]));
        span = std::max(span, 1.0);
        while (static_cast<int>(candidates.size()) < opts.corridor_retries) {
            auto jittered = linear_waypoints(ya, yb, 3);
            const double scale = 0.05 * span * (1.0 + candidates.size() * 0.25);
            for (auto& w : jittered) {
                for (double& v : w) v += scale * rng.normal();
                if (model.space_dim() == 1 && model.has_pair_terms())
                    std::sort(w.begin(), w.end());
            }
            candidates.push_back(std::move(jittered));
        }
    }

    for (const auto& cand : candidates) {
        ControlPath path = assemble(x0, x1, t, eps, cand, dim);
        if (path_valid(model, path, opts.grid_points, dist_floor)) return path;
    }
    // corridor floor not met anywhere; fall back to the best in-domain path
    for (const auto& cand : candidates) {
        ControlPath path = assemble(x0, x1, t, eps, cand, dim);
        if (path_valid(model, path, opts.grid_points, 0.0)) return path;
    }
    throw PathError(user_waypoints
                        ? "build_path: spline through the supplied waypoints exits O"
                        : "build_path: no in-domain corridor found; supply waypoints");
}

Vec control_at(const PotentialModel& model, const ControlPath& path, double gamma,
               double temperature, double s) {
    if (gamma <= 0.0 || temperature <= 0.0)
        throw ConfigError("control synthesis requires gamma > 0 and temperature > 0");
    const int dim = path.dim();
    Vec phi(dim), dphi(dim), ddphi(dim), xi(dim);
    path.eval(s, phi, dphi, ddphi);
    Vec g = model.gradient(phi);
    const double scale = 1.0 / std::sqrt(2.0 * gamma * temperature);
    for (int i = 0; i < dim; ++i) xi[i] = scale * (ddphi[i] + gamma * dphi[i] + g[i]);
    return xi;
}

ControlSamples synthesize_control(const PotentialModel& model, const ControlPath& path,
                                  double gamma, double temperature, int n_grid) {
    ControlSamples out;
    const int dim = path.dim();
    out.s_grid.resize(n_grid);
    out.phi = Mat(n_grid, dim);
    out.xi = Mat(n_grid, dim);
    Vec phi(dim), dphi(dim), ddphi(dim);
    Vec xi2(n_grid);
    for (int k = 0; k < n_grid; ++k) {
        const double s = path.t_final() * k / (n_grid - 1);
        out.s_grid[k] = s;
        path.eval(s, phi, dphi, ddphi);
        Vec xi = control_at(model, path, gamma, temperature, s);
        for (int i = 0; i < dim; ++i) {
            out.phi(k, i) = phi[i];
            out.xi(k, i) = xi[i];
        }
        xi2[k] = nrm2_sq(xi);
    }
    const double ds = path.t_final() / (n_grid - 1);
    for (int k = 0; k + 1 < n_grid; ++k) out.cost += 0.5 * (xi2[k] + xi2[k + 1]) * ds;
    return out;
}

ReachReport verify_reachability(const PotentialModel& model, const PhaseState& x0,
                                const PhaseState& x1, double t, double gamma, double temperature,
                                const std::vector<Vec>& waypoints, const BuildOptions& opts) {
    const int dim = model.dim();
    ControlPath path = build_path(model, x0, x1, t, waypoints, opts);
    auto samples = synthesize_control(model, path, gamma, temperature, 1025);

    const double root = std::sqrt(2.0 * gamma * temperature);
    ReachReport rep;
    rep.cost = samples.cost;

    Vec y0(2 * dim);
    std::copy(x0.q.begin(), x0.q.end(), y0.begin());
    std::copy(x0.p.begin(), x0.p.end(), y0.begin() + dim);

    Vec phi(dim), dphi(dim), ddphi(dim);
    auto rhs = [&](double s, Span y, std::span<double> dy) {
        Span q = y.subspan(0, dim);
        Span p = y.subspan(dim, dim);
        path.eval(s, phi, dphi, ddphi);
        Vec g_path = model.gradient(phi);
        Vec g = model.gradient(q);
        for (int i = 0; i < dim; ++i) {
            const double xi = (ddphi[i] + gamma * dphi[i] + g_path[i]) / root;
            dy[i] = p[i];
            dy[dim + i] = -gamma * p[i] - g[i] + root * xi;
        }
    };
    auto observer = [&](double s, Span y) {
        Span q = y.subspan(0, dim);
        const double u = model.is_in_domain(q) ? model.value(q)
                                               : std::numeric_limits<double>::infinity();
        rep.max_u = std::max(rep.max_u, u);
        if (!std::isfinite(u)) return false;
        path.eval(s, phi, dphi, ddphi);
        double dev = 0.0;
        for (int i = 0; i < dim; ++i) dev = std::max(dev, std::abs(q[i] - phi[i]));
        rep.max_path_dev = std::max(rep.max_path_dev, dev);
        return true;
    };

    auto ode = rk45(rhs, 0.0, t, y0, 1e-10, 1e-12, observer);
    rep.ode_accepted = ode.accepted;
    rep.ode_rejected = ode.rejected;
    if (!ode.ok) {
        rep.pass = false;
        rep.endpoint_error = std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.q_end.assign(ode.y.begin(), ode.y.begin() + dim);
    rep.p_end.assign(ode.y.begin() + dim, ode.y.end());
    double err2 = 0.0, target2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        err2 += (rep.q_end[i] - x1.q[i]) * (rep.q_end[i] - x1.q[i]);
        err2 += (rep.p_end[i] - x1.p[i]) * (rep.p_end[i] - x1.p[i]);
        target2 += x1.q[i] * x1.q[i] + x1.p[i] * x1.p[i];
    }
    rep.endpoint_error = std::sqrt(err2);
    rep.tolerance = 1e-6 * (1.0 + std::sqrt(target2));
    rep.pass = rep.endpoint_error <= rep.tolerance && std::isfinite(rep.max_u);
    return rep;
}

}  // namespace slg
