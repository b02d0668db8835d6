#include "core/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/quadrature.hpp"

namespace slg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RadialDeriv {
    double f, df, ddf;
};

// Adds gradient/Hessian of a radial profile f(|x|) acting on the m
// coordinates starting at offset.  Requires |x| > 0.
void add_radial_gradient(const RadialDeriv& rd, Span x, double r, std::span<double> out) {
    const double c = rd.df / r;
    for (std::size_t k = 0; k < x.size(); ++k) out[k] += c * x[k];
}

void add_radial_hessian(const RadialDeriv& rd, Span x, double r, Mat& h, int off_i, int off_j,
                        double sign) {
    const int m = static_cast<int>(x.size());
    const double c1 = rd.df / r;
    const double c2 = (rd.ddf - c1) / (r * r);
    // assign mirrored entries from one product so symmetry is bit-exact
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            double v = c2 * (x[a] * x[b]);
            if (a == b) v += c1;
            h(off_i + a, off_j + b) += sign * v;
            if (a != b) h(off_i + b, off_j + a) += sign * v;
        }
}

}  // namespace

void PotentialModel::check_dim(Span q) const {
    if (static_cast<int>(q.size()) != dim())
        throw ConfigError("coordinate array has length " + std::to_string(q.size()) +
                          ", expected N*d = " + std::to_string(dim()));
}

double PotentialModel::value(Span q) const {
    check_dim(q);
    if (!all_finite(q)) throw ConfigError("coordinates must be finite");
    if (!in_domain_impl(q)) return kInf;
    return value_impl(q);
}

void PotentialModel::gradient(Span q, std::span<double> out) const {
    check_dim(q);
    if (!in_domain_impl(q)) throw DomainError("gradient requested outside the domain O");
    gradient_impl(q, out);
}

void PotentialModel::hessian(Span q, Mat& out) const {
    check_dim(q);
    if (!in_domain_impl(q)) throw DomainError("hessian requested outside the domain O");
    if (out.rows() != dim()) out.resize(dim());
    out.set_zero();
    hessian_impl(q, out);
}

bool PotentialModel::is_in_domain(Span q) const {
    check_dim(q);
    if (!all_finite(q)) return false;
    return in_domain_impl(q);
}

double PotentialModel::min_pair_distance(Span q) const {
    if (!pair_terms_) return kInf;
    double m = kInf;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) {
            double s = 0.0;
            for (int k = 0; k < d_; ++k) {
                const double e = q[i * d_ + k] - q[j * d_ + k];
                s += e * e;
            }
            m = std::min(m, std::sqrt(s));
        }
    return m;
}

bool PotentialModel::same_component(Span qa, Span qb) const {
    return is_in_domain(qa) && is_in_domain(qb);
}

Vec PotentialModel::deform(EscapeRoute route, double s, Span base) const {
    Vec q(base.begin(), base.end());
    if (route == EscapeRoute::Outward) {
        for (double& v : q) v *= s;
        return q;
    }
    // Collapse: contract the closest pair about its first member.
    if (!pair_terms_) throw SamplingError("no collapse route for this family");
    int bi = 0, bj = 1;
    double best = kInf;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) {
            double ss = 0.0;
            for (int k = 0; k < d_; ++k) {
                const double e = base[i * d_ + k] - base[j * d_ + k];
                ss += e * e;
            }
            if (ss < best) {
                best = ss;
                bi = i;
                bj = j;
            }
        }
    for (int k = 0; k < d_; ++k)
        q[bj * d_ + k] = base[bi * d_ + k] + s * (base[bj * d_ + k] - base[bi * d_ + k]);
    return q;
}

Vec PotentialModel::escape_config(EscapeRoute route, double u_target, CounterRng& rng) const {
    if (route == EscapeRoute::Collapse && !has_collapse_route())
        throw SamplingError("family has no collapse escape route");
    // Jittered anchor keeps direction choice random but in-domain.
    Vec base = anchor();
    for (int attempt = 0; attempt < 100; ++attempt) {
        Vec cand = base;
        for (double& v : cand) v *= (1.0 + 0.05 * rng.normal());
        if (d_ == 1 && pair_terms_) std::sort(cand.begin(), cand.end());
        if (is_in_domain(cand) && std::isfinite(value_impl(cand))) {
            base = cand;
            break;
        }
    }
    auto u_at = [&](double s) {
        Vec q = deform(route, s, base);
        return is_in_domain(q) ? value_impl(q) : kInf;
    };
    const double grow = route == EscapeRoute::Outward ? 2.0 : 0.5;
    double s_lo = 1.0, s_hi = 1.0;
    if (u_at(1.0) < u_target) {
        for (int k = 0; k < 400 && u_at(s_hi) < u_target; ++k) {
            s_lo = s_hi;
            s_hi *= grow;
        }
        if (u_at(s_hi) < u_target) throw SamplingError("escape target unreachable");
    } else {
        for (int k = 0; k < 400 && u_at(s_lo) > u_target; ++k) {
            s_hi = s_lo;
            s_lo /= grow;
        }
        if (u_at(s_lo) > u_target) throw SamplingError("escape target unreachable");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(s_lo * s_hi);
        if (u_at(mid) < u_target)
            s_lo = mid;
        else
            s_hi = mid;
        if (std::abs(u_at(s_hi) - u_target) <= 1e-9 * (1.0 + u_target)) break;
    }
    return deform(route, s_hi, base);
}

Vec PotentialModel::sample_sublevel(double u_max, CounterRng& rng) const {
    // Uniform proposal over the confinement-derived bounding box of the
    // sublevel set; its acceptance rate is scale-free.
    Vec lo, hi;
    sublevel_box(u_max, lo, hi);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Vec q(dim());
        for (int i = 0; i < dim(); ++i) q[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
        if (d_ == 1 && pair_terms_) std::sort(q.begin(), q.end());
        if (!is_in_domain(q)) continue;
        if (value_impl(q) <= u_max) return q;
    }
    throw SamplingError("sublevel sampler exhausted its 100x oversampling budget");
}

// ---------------------------------------------------------------------
// PolyConfine

class PolyConfine final : public PotentialModel {
public:
    PolyConfine(double A, double alpha, int n, int d)
        : PotentialModel(Family::PolyConfine, n, d, false), a_(A), alpha_(alpha) {
        if (A < 0.0) throw ConfigError("poly_confine: A must be >= 0");
        if (alpha <= 0.0) throw ConfigError("poly_confine: alpha must be > 0");
        if (n < 1 || d < 1) throw ConfigError("poly_confine: N, d must be >= 1");
    }

    Vec anchor() const override {
        Vec q(dim());
        const double r0 = a_ > 0.0 ? std::pow(1.0 / a_, 1.0 / alpha_) : 1.0;
        const double c = r0 / std::sqrt(static_cast<double>(dim()));
        for (double& v : q) v = c;
        return q;
    }

    void sublevel_box(double u_cap, Vec& lo, Vec& hi) const override {
        if (a_ <= 0.0) throw SamplingError("poly_confine: sublevel set unbounded for A = 0");
        const double L = std::pow(u_cap / a_, 1.0 / alpha_);
        lo.assign(dim(), -L);
        hi.assign(dim(), L);
    }

protected:
    bool in_domain_impl(Span) const override { return true; }

    double value_impl(Span q) const override {
        const double r = nrm2(q);
        return a_ * std::pow(r, alpha_);
    }

    void gradient_impl(Span q, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
        const double r = nrm2(q);
        if (r == 0.0) {
            if (alpha_ > 1.0 || a_ == 0.0) return;  // gradient -> 0
            throw DomainError("poly_confine: gradient singular at the origin for alpha <= 1");
        }
        RadialDeriv rd{0.0, a_ * alpha_ * std::pow(r, alpha_ - 1.0), 0.0};
        add_radial_gradient(rd, q, r, out);
    }

    void hessian_impl(Span q, Mat& h) const override {
        const double r = nrm2(q);
        if (r == 0.0) {
            if (a_ == 0.0 || alpha_ > 2.0) return;
            if (alpha_ == 2.0) {
                for (int i = 0; i < dim(); ++i) h(i, i) = 2.0 * a_;
                return;
            }
            throw DomainError("poly_confine: hessian singular at the origin for alpha < 2");
        }
        RadialDeriv rd{0.0, a_ * alpha_ * std::pow(r, alpha_ - 1.0),
                       a_ * alpha_ * (alpha_ - 1.0) * std::pow(r, alpha_ - 2.0)};
        add_radial_hessian(rd, q, r, h, 0, 0, 1.0);
    }

private:
    double a_, alpha_;
};

// ---------------------------------------------------------------------
// SingularPair1D

class SingularPair1D final : public PotentialModel {
public:
    SingularPair1D(double A, double alpha, double B, double beta)
        : PotentialModel(Family::SingularPair1D, 1, 1, false),
          a_(A),
          alpha_(alpha),
          b_(B),
          beta_(beta) {
        if (A <= 0.0 || B <= 0.0) throw ConfigError("singular_pair_1d: A, B must be > 0");
        if (alpha <= 1.0) throw ConfigError("singular_pair_1d: alpha must be > 1");
        if (beta <= 0.0) throw ConfigError("singular_pair_1d: beta must be > 0");
    }

    Vec anchor() const override {
        // Closed-form minimizer of A q^alpha + B q^-beta.
        return {std::pow(b_ * beta_ / (a_ * alpha_), 1.0 / (alpha_ + beta_))};
    }

    bool has_collapse_route() const override { return true; }

    void sublevel_box(double u_cap, Vec& lo, Vec& hi) const override {
        lo.assign(1, 0.5 * std::pow(b_ / u_cap, 1.0 / beta_));
        hi.assign(1, std::pow(u_cap / a_, 1.0 / alpha_));
    }

protected:
    bool in_domain_impl(Span q) const override { return q[0] > 0.0; }

    double value_impl(Span q) const override {
        return a_ * std::pow(q[0], alpha_) + b_ * std::pow(q[0], -beta_);
    }

    void gradient_impl(Span q, std::span<double> out) const override {
        out[0] = a_ * alpha_ * std::pow(q[0], alpha_ - 1.0) -
                 b_ * beta_ * std::pow(q[0], -beta_ - 1.0);
    }

    void hessian_impl(Span q, Mat& h) const override {
        h(0, 0) = a_ * alpha_ * (alpha_ - 1.0) * std::pow(q[0], alpha_ - 2.0) +
                  b_ * beta_ * (beta_ + 1.0) * std::pow(q[0], -beta_ - 2.0);
    }

    Vec deform(EscapeRoute, double s, Span base) const override {
        // Outward uses s >= 1, collapse s <= 1; both are pure scalings here.
        return {base[0] * s};
    }

private:
    double a_, alpha_, b_, beta_;
};

// ---------------------------------------------------------------------
// Interacting system (confinement + pairwise repulsion, optional LJ well)

class Interacting final : public PotentialModel {
public:
    Interacting(double A, double alpha, double B, double beta, double well_c1, int n, int d)
        : PotentialModel(Family::Interacting, n, d, n >= 2),
          a_(A),
          alpha_(alpha),
          b_(B),
          beta_(beta),
          well_(well_c1) {
        if (A <= 0.0) throw ConfigError("interacting: A must be > 0");
        if (alpha <= 1.0) throw ConfigError("interacting: alpha must be > 1");
        if (n >= 2) {
            if (B <= 0.0) throw ConfigError("interacting: B must be > 0");
            if (beta <= 0.0) throw ConfigError("interacting: beta must be > 0");
        }
        if (well_c1 < 0.0) throw ConfigError("interacting: c1 must be >= 0");
        if (well_c1 > 0.0 && beta != 12.0)
            throw ConfigError("interacting: the Lennard-Jones well term requires beta = 12");
        if (n < 1 || d < 1) throw ConfigError("interacting: N, d must be >= 1");
        shift_ = well_ > 0.0 ? well_ * well_ / (4.0 * b_) : 0.0;
    }

    double conf_A() const { return a_; }
    double conf_alpha() const { return alpha_; }
    double pair_B() const { return b_; }
    double pair_beta() const { return beta_; }

    Vec anchor() const override {
        double spacing = 1.0;
        if (pair_terms_)
            spacing = well_ > 0.0 ? std::pow(2.0 * b_ / well_, 1.0 / 6.0)
                                  : std::pow(b_, 1.0 / beta_) + 1.0;
        Vec q(dim(), 0.0);
        for (int i = 0; i < n_; ++i)
            q[i * d_] = (i - 0.5 * (n_ - 1) + 0.25) * spacing;
        return q;
    }

    bool has_collapse_route() const override { return pair_terms_; }

    void sublevel_box(double u_cap, Vec& lo, Vec& hi) const override {
        // U >= A |q_i|^alpha per coordinate, so the box is a safe superset.
        const double L = std::pow(u_cap / a_, 1.0 / alpha_);
        lo.assign(dim(), -L);
        hi.assign(dim(), L);
    }

protected:
    bool in_domain_impl(Span q) const override {
        if (!pair_terms_) return true;
        if (d_ == 1) {
            for (int i = 0; i + 1 < n_; ++i)
                if (!(q[i] < q[i + 1])) return false;
            return true;
        }
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                bool equal = true;
                for (int k = 0; k < d_; ++k)
                    if (q[i * d_ + k] != q[j * d_ + k]) {
                        equal = false;
                        break;
                    }
                if (equal) return false;
            }
        return true;
    }

    double value_impl(Span q) const override {
        double u = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double r = nrm2(q.subspan(i * d_, d_));
            u += a_ * std::pow(r, alpha_);
        }
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) u += pair_profile(pair_dist(q, i, j)).f;
        return u;
    }

    void gradient_impl(Span q, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
        for (int i = 0; i < n_; ++i) {
            auto xi = q.subspan(i * d_, d_);
            const double r = nrm2(xi);
            if (r == 0.0) {
                if (alpha_ > 1.0) continue;
                throw DomainError("interacting: confinement gradient singular at the origin");
            }
            RadialDeriv rd{0.0, a_ * alpha_ * std::pow(r, alpha_ - 1.0), 0.0};
            add_radial_gradient(rd, xi, r, out.subspan(i * d_, d_));
        }
        Vec e(d_);
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                double r = 0.0;
                for (int k = 0; k < d_; ++k) {
                    e[k] = q[i * d_ + k] - q[j * d_ + k];
                    r += e[k] * e[k];
                }
                r = std::sqrt(r);
                const RadialDeriv rd = pair_profile(r);
                const double c = rd.df / r;
                for (int k = 0; k < d_; ++k) {
                    out[i * d_ + k] += c * e[k];
                    out[j * d_ + k] -= c * e[k];
                }
            }
    }

    void hessian_impl(Span q, Mat& h) const override {
        for (int i = 0; i < n_; ++i) {
            auto xi = q.subspan(i * d_, d_);
            const double r = nrm2(xi);
            if (r == 0.0) {
                if (alpha_ == 2.0) {
                    for (int k = 0; k < d_; ++k) h(i * d_ + k, i * d_ + k) += 2.0 * a_;
                    continue;
                }
                if (alpha_ > 2.0) continue;
                throw DomainError("interacting: confinement hessian singular at the origin");
            }
            RadialDeriv rd{0.0, a_ * alpha_ * std::pow(r, alpha_ - 1.0),
                           a_ * alpha_ * (alpha_ - 1.0) * std::pow(r, alpha_ - 2.0)};
            add_radial_hessian(rd, xi, r, h, i * d_, i * d_, 1.0);
        }
        Vec e(d_);
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                double r = 0.0;
                for (int k = 0; k < d_; ++k) {
                    e[k] = q[i * d_ + k] - q[j * d_ + k];
                    r += e[k] * e[k];
                }
                r = std::sqrt(r);
                const RadialDeriv rd = pair_profile(r);
                add_radial_hessian(rd, e, r, h, i * d_, i * d_, 1.0);
                add_radial_hessian(rd, e, r, h, j * d_, j * d_, 1.0);
                add_radial_hessian(rd, e, r, h, i * d_, j * d_, -1.0);
                add_radial_hessian(rd, e, r, h, j * d_, i * d_, -1.0);
            }
    }

private:
    double pair_dist(Span q, int i, int j) const {
        double s = 0.0;
        for (int k = 0; k < d_; ++k) {
            const double e = q[i * d_ + k] - q[j * d_ + k];
            s += e * e;
        }
        return std::sqrt(s);
    }

    RadialDeriv pair_profile(double r) const {
        RadialDeriv rd;
        rd.f = b_ * std::pow(r, -beta_);
        rd.df = -b_ * beta_ * std::pow(r, -beta_ - 1.0);
        rd.ddf = b_ * beta_ * (beta_ + 1.0) * std::pow(r, -beta_ - 2.0);
        if (well_ > 0.0) {
            const double r6 = std::pow(r, -6.0);
            rd.f += -well_ * r6 + shift_;
            rd.df += 6.0 * well_ * r6 / r;
            rd.ddf += -42.0 * well_ * r6 / (r * r);
        }
        return rd;
    }

    double a_, alpha_, b_, beta_, well_, shift_ = 0.0;
};

// ---------------------------------------------------------------------
// Composite: user-specified sums of built-in confinement and pair powers

class Composite final : public PotentialModel {
public:
    Composite(Vec cA, Vec calpha, Vec pB, Vec pbeta, int n, int d)
        : PotentialModel(Family::Composite, n, d, !pB.empty() && n >= 2),
          ca_(std::move(cA)),
          calpha_(std::move(calpha)),
          pb_(std::move(pB)),
          pbeta_(std::move(pbeta)) {
        if (ca_.size() != calpha_.size() || pb_.size() != pbeta_.size())
            throw ConfigError("composite: coefficient/exponent lists must have equal length");
        if (ca_.empty()) throw ConfigError("composite: at least one confinement term required");
        for (std::size_t k = 0; k < ca_.size(); ++k)
            if (ca_[k] < 0.0 || calpha_[k] <= 0.0)
                throw ConfigError("composite: confinement terms need A >= 0, alpha > 0");
        for (std::size_t k = 0; k < pb_.size(); ++k)
            if (pb_[k] <= 0.0 || pbeta_[k] <= 0.0)
                throw ConfigError("composite: pair terms need B > 0, beta > 0");
        if (n < 1 || d < 1) throw ConfigError("composite: N, d must be >= 1");
    }

    Vec anchor() const override {
        double spacing = 1.0;
        if (pair_terms_) spacing = std::pow(pb_[0], 1.0 / pbeta_[0]) + 1.0;
        Vec q(dim(), 0.0);
        for (int i = 0; i < n_; ++i) q[i * d_] = (i - 0.5 * (n_ - 1) + 0.25) * spacing;
        return q;
    }

    bool has_collapse_route() const override { return pair_terms_; }

    void sublevel_box(double u_cap, Vec& lo, Vec& hi) const override {
        double L = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < ca_.size(); ++k)
            if (ca_[k] > 0.0) L = std::min(L, std::pow(u_cap / ca_[k], 1.0 / calpha_[k]));
        if (!std::isfinite(L)) throw SamplingError("composite: sublevel set unbounded");
        lo.assign(dim(), -L);
        hi.assign(dim(), L);
    }

protected:
    bool in_domain_impl(Span q) const override {
        if (!pair_terms_) return true;
        if (d_ == 1) {
            for (int i = 0; i + 1 < n_; ++i)
                if (!(q[i] < q[i + 1])) return false;
            return true;
        }
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                double s = 0.0;
                for (int k = 0; k < d_; ++k) {
                    const double e = q[i * d_ + k] - q[j * d_ + k];
                    s += e * e;
                }
                if (s == 0.0) return false;
            }
        return true;
    }

    double value_impl(Span q) const override {
        double u = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double r = nrm2(q.subspan(i * d_, d_));
            for (std::size_t k = 0; k < ca_.size(); ++k) u += ca_[k] * std::pow(r, calpha_[k]);
        }
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                double s = 0.0;
                for (int k = 0; k < d_; ++k) {
                    const double e = q[i * d_ + k] - q[j * d_ + k];
                    s += e * e;
                }
                const double r = std::sqrt(s);
                for (std::size_t m = 0; m < pb_.size(); ++m) u += pb_[m] * std::pow(r, -pbeta_[m]);
            }
        return u;
    }

    void gradient_impl(Span q, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
        for (int i = 0; i < n_; ++i) {
            auto xi = q.subspan(i * d_, d_);
            const double r = nrm2(xi);
            if (r == 0.0) continue;  // all-confinement gradients vanish only for alpha > 1
            double df = 0.0;
            for (std::size_t k = 0; k < ca_.size(); ++k)
                df += ca_[k] * calpha_[k] * std::pow(r, calpha_[k] - 1.0);
            RadialDeriv rd{0.0, df, 0.0};
            add_radial_gradient(rd, xi, r, out.subspan(i * d_, d_));
        }
        Vec e(d_);
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                double s = 0.0;
                for (int k = 0; k < d_; ++k) {
                    e[k] = q[i * d_ + k] - q[j * d_ + k];
                    s += e[k] * e[k];
                }
                const double r = std::sqrt(s);
                double df = 0.0;
                for (std::size_t m = 0; m < pb_.size(); ++m)
                    df += -pb_[m] * pbeta_[m] * std::pow(r, -pbeta_[m] - 1.0);
                const double c = df / r;
                for (int k = 0; k < d_; ++k) {
                    out[i * d_ + k] += c * e[k];
                    out[j * d_ + k] -= c * e[k];
                }
            }
    }

    void hessian_impl(Span q, Mat& h) const override {
        for (int i = 0; i < n_; ++i) {
            auto xi = q.subspan(i * d_, d_);
            const double r = nrm2(xi);
            if (r == 0.0) {
                for (std::size_t k = 0; k < ca_.size(); ++k) {
                    if (calpha_[k] == 2.0)
                        for (int kk = 0; kk < d_; ++kk)
                            h(i * d_ + kk, i * d_ + kk) += 2.0 * ca_[k];
                    else if (calpha_[k] < 2.0 && ca_[k] > 0.0)
                        throw DomainError("composite: hessian singular at the origin");
                }
                continue;
            }
            double df = 0.0, ddf = 0.0;
            for (std::size_t k = 0; k < ca_.size(); ++k) {
                df += ca_[k] * calpha_[k] * std::pow(r, calpha_[k] - 1.0);
                ddf += ca_[k] * calpha_[k] * (calpha_[k] - 1.0) * std::pow(r, calpha_[k] - 2.0);
            }
            RadialDeriv rd{0.0, df, ddf};
            add_radial_hessian(rd, xi, r, h, i * d_, i * d_, 1.0);
        }
        Vec e(d_);
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                double s = 0.0;
                for (int k = 0; k < d_; ++k) {
                    e[k] = q[i * d_ + k] - q[j * d_ + k];
                    s += e[k] * e[k];
                }
                const double r = std::sqrt(s);
                double df = 0.0, ddf = 0.0;
                for (std::size_t m = 0; m < pb_.size(); ++m) {
                    df += -pb_[m] * pbeta_[m] * std::pow(r, -pbeta_[m] - 1.0);
                    ddf += pb_[m] * pbeta_[m] * (pbeta_[m] + 1.0) * std::pow(r, -pbeta_[m] - 2.0);
                }
                RadialDeriv rd{0.0, df, ddf};
                add_radial_hessian(rd, e, r, h, i * d_, i * d_, 1.0);
                add_radial_hessian(rd, e, r, h, j * d_, j * d_, 1.0);
                add_radial_hessian(rd, e, r, h, i * d_, j * d_, -1.0);
                add_radial_hessian(rd, e, r, h, j * d_, i * d_, -1.0);
            }
    }

private:
    Vec ca_, calpha_, pb_, pbeta_;
};

ModelPtr make_poly_confine(double A, double alpha, int n, int d) {
    return std::make_shared<PolyConfine>(A, alpha, n, d);
}
ModelPtr make_singular_pair_1d(double A, double alpha, double B, double beta) {
    return std::make_shared<SingularPair1D>(A, alpha, B, beta);
}
ModelPtr make_interacting(double A, double alpha, double B, double beta, double well_c1, int n,
                          int d) {
    return std::make_shared<Interacting>(A, alpha, B, beta, well_c1, n, d);
}
ModelPtr make_composite(Span conf_A, Span conf_alpha, Span pair_B, Span pair_beta, int n, int d) {
    return std::make_shared<Composite>(Vec(conf_A.begin(), conf_A.end()),
                                       Vec(conf_alpha.begin(), conf_alpha.end()),
                                       Vec(pair_B.begin(), pair_B.end()),
                                       Vec(pair_beta.begin(), pair_beta.end()), n, d);
}

// ---------------------------------------------------------------------
// Admissibility probes

std::vector<ProbeSequence> default_probe_sequences(const PotentialModel& model,
                                                   const ProbeOptions& opts) {
    CounterRng rng(opts.seed, 0xADDA);
    std::vector<ProbeSequence> out;
    const int n_pts = std::max(8, opts.points_per_sequence);

    auto jittered_anchor = [&]() {
        Vec base = model.anchor();
        Vec cand = base;
        for (double& v : cand) v *= (1.0 + 0.05 * rng.normal());
        if (model.space_dim() == 1 && model.has_pair_terms())
            std::sort(cand.begin(), cand.end());
        return model.is_in_domain(cand) ? cand : base;
    };

    struct Plan {
        const char* label;
        EscapeRoute route;
        double s0, factor;
    };
    std::vector<Plan> plans = {{"outward_a", EscapeRoute::Outward, 2.0, 2.0},
                               {"outward_b", EscapeRoute::Outward, 3.0, 2.0}};
    if (model.has_collapse_route()) {
        plans.push_back({"collapse_a", EscapeRoute::Collapse, 0.5, 0.5});
        plans.push_back({"collapse_b", EscapeRoute::Collapse, 0.4, 0.5});
    }
    for (const auto& plan : plans) {
        ProbeSequence seq;
        seq.label = plan.label;
        Vec base = jittered_anchor();
        double s = plan.s0;
        for (int k = 0; k < n_pts; ++k) {
            seq.points.push_back(model.deformed(plan.route, s, base));
            s *= plan.factor;
        }
        out.push_back(std::move(seq));
    }
    return out;
}

AdmissibilityReport probe_admissibility(const PotentialModel& model, double temperature,
                                        const std::vector<ProbeSequence>& sequences,
                                        const ProbeOptions& opts) {
    if (temperature <= 0.0) throw ConfigError("probe_admissibility: temperature must be > 0");
    AdmissibilityReport rep;
    const int window = opts.trend_window;
    Mat h(model.dim());
    Vec g(model.dim());

    for (const auto& seq : sequences) {
        SequenceReport sr;
        sr.label = seq.label;
        for (const auto& point : seq.points) {
            if (!model.is_in_domain(point)) {
                sr.valid = false;
                break;
            }
            const double u = model.value(point);
            if (!std::isfinite(u)) {
                sr.valid = false;
                break;
            }
            model.gradient(point, g);
            model.hessian(point, h);
            sr.u.push_back(u);
            sr.grad_norm.push_back(nrm2(g));
            const double g2 = nrm2_sq(g);
            sr.ratio.push_back(g2 > 0.0 ? h.frobenius() / g2
                                        : std::numeric_limits<double>::infinity());
        }
        if (sr.valid && static_cast<int>(sr.u.size()) >= window) {
            sr.escaping = true;
            for (std::size_t k = 1; k < sr.u.size(); ++k)
                if (!(sr.u[k] > sr.u[k - 1])) sr.escaping = false;
            sr.grad_increasing = true;
            sr.ratio_decreasing = true;
            const std::size_t n = sr.u.size();
            for (std::size_t k = n - window + 1; k < n; ++k) {
                if (!(sr.grad_norm[k] > sr.grad_norm[k - 1])) sr.grad_increasing = false;
                if (!(sr.ratio[k] < sr.ratio[k - 1])) sr.ratio_decreasing = false;
            }
            sr.pass = sr.escaping && sr.grad_increasing && sr.ratio_decreasing;
        }
        rep.sequences.push_back(std::move(sr));
    }

    // Integrability of exp(-U/T): exact quadrature at desk dimension,
    // otherwise a batched Monte Carlo estimate over a bounding box.
    const double u_cap = opts.u_cap_factor * temperature;
    Vec lo, hi;
    bool box_ok = true;
    try {
        model.sublevel_box(u_cap, lo, hi);
    } catch (const SamplingError&) {
        box_ok = false;
    }

    auto boltz = [&](Span q) {
        if (!model.is_in_domain(q)) return 0.0;
        const double u = model.value(q);
        return std::isfinite(u) ? std::exp(-u / temperature) : 0.0;
    };

    if (!box_ok) {
        rep.integral_converged = false;
    } else if (model.dim() <= 3) {
        auto quad = integrate_box(boltz, lo, hi, 1e-8);
        rep.integral_estimate = quad.value;
        rep.integral_converged = quad.converged && quad.value > 0.0;
        rep.integral_by_quadrature = true;
    } else {
        // importance estimate: a Gaussian component matched to the thermal
        // bulk plus a uniform component over the box, so the weights stay
        // bounded by 2 * volume whatever the tails do
        CounterRng rng(opts.seed, 0x1B07);
        double volume = 1.0;
        for (int i = 0; i < model.dim(); ++i) volume *= (hi[i] - lo[i]);
        const Vec center = model.anchor();
        Vec blo, bhi;
        model.sublevel_box(std::max(3.0 * temperature, 1e-3), blo, bhi);
        Vec sigma(model.dim());
        for (int i = 0; i < model.dim(); ++i) sigma[i] = std::max(bhi[i] - blo[i], 1e-3) * 0.5;

        const double log_two_pi = std::log(2.0 * 3.14159265358979323846);
        auto pdf = [&](Span q) {
            double log_gauss = 0.0;
            bool in_box = true;
            for (int i = 0; i < model.dim(); ++i) {
                const double z = (q[i] - center[i]) / sigma[i];
                log_gauss += -0.5 * z * z - std::log(sigma[i]) - 0.5 * log_two_pi;
                in_box = in_box && q[i] >= lo[i] && q[i] <= hi[i];
            }
            return 0.5 * std::exp(log_gauss) + (in_box ? 0.5 / volume : 0.0);
        };

        const int batches = 10;
        const long long per_batch = std::max<long long>(1, opts.mc_samples / batches);
        Vec batch_means;
        Vec q(model.dim());
        for (int bidx = 0; bidx < batches; ++bidx) {
            double acc = 0.0;
            for (long long s = 0; s < per_batch; ++s) {
                if (rng.uniform() < 0.5) {
                    for (int i = 0; i < model.dim(); ++i)
                        q[i] = center[i] + sigma[i] * rng.normal();
                } else {
                    for (int i = 0; i < model.dim(); ++i)
                        q[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
                }
                const double f = boltz(q);
                if (f > 0.0) acc += f / pdf(q);
            }
            batch_means.push_back(acc / static_cast<double>(per_batch));
        }
        // median of means keeps one unlucky batch from wrecking the verdict
        Vec sorted = batch_means;
        std::sort(sorted.begin(), sorted.end());
        rep.integral_estimate = 0.5 * (sorted[batches / 2 - 1] + sorted[batches / 2]);
        double mean = std::accumulate(batch_means.begin(), batch_means.end(), 0.0) / batches;
        double var = 0.0;
        for (double v : batch_means) var += (v - mean) * (v - mean);
        var /= (batches - 1);
        rep.integral_std_error = std::sqrt(var / batches);
        rep.integral_converged =
            rep.integral_estimate > 0.0 && rep.integral_std_error < 0.1 * rep.integral_estimate;
    }

    int n_valid = 0;
    bool all_pass = true;
    for (const auto& sr : rep.sequences) {
        if (!sr.valid) continue;
        ++n_valid;
        all_pass = all_pass && sr.pass;
    }
    rep.pass = n_valid > 0 && all_pass && rep.integral_converged;
    return rep;
}

// ---------------------------------------------------------------------
// Sampled gradient lower bound for the interacting family

GradientBoundReport verify_gradient_lower_bound(const PotentialModel& model, long long n_samples,
                                                std::uint64_t seed) {
    const auto* sys = dynamic_cast<const Interacting*>(&model);
    if (!sys) throw ConfigError("gradient lower bound applies to the interacting family only");

    const int N = model.particles(), d = model.space_dim(), dim = model.dim();
    const double sqrtN = std::sqrt(static_cast<double>(N));
    GradientBoundReport rep;
    rep.c1 = sys->conf_A() * sys->conf_alpha() / (2.0 * sqrtN);
    rep.c2 = sys->pair_B() * sys->pair_beta() / (2.0 * sqrtN * N * N);
    rep.samples = n_samples;

    const double am1 = sys->conf_alpha() - 1.0;
    const double bm1 = sys->pair_beta() + 1.0;

    Vec deficits;
    deficits.reserve(n_samples);
    Vec g(dim);
    for (long long s = 0; s < n_samples; ++s) {
        CounterRng rng(seed, 0xBEEF0000ULL + static_cast<std::uint64_t>(s));
        Vec q(dim);
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            const double sigma = 2.0;
            for (int i = 0; i < dim; ++i) q[i] = sigma * rng.normal();
            if (d == 1) std::sort(q.begin(), q.end());
            const int mode = static_cast<int>(s % 5);
            if (mode == 1 || mode == 4) {
                const double scale = std::pow(10.0, 2.0 * rng.uniform());
                for (double& v : q) v *= scale;
            }
            if ((mode == 2 || mode == 4) && N >= 2) {
                // squeeze one pair down to distance 10^-u
                const int i = static_cast<int>(rng.next_u64() % N);
                int j = static_cast<int>(rng.next_u64() % N);
                if (j == i) j = (i + 1) % N;
                const int pi = std::min(i, j), pj = std::max(i, j);
                const double dist = std::pow(10.0, -3.0 * rng.uniform());
                if (d == 1) {
                    // contract an adjacent gap so the ordering survives
                    const int a = pi, bx = std::min(pi + 1, N - 1);
                    if (a != bx) q[bx] = q[a] + dist;
                } else {
                    double rr = 0.0;
                    for (int k = 0; k < d; ++k) {
                        const double e = q[pj * d + k] - q[pi * d + k];
                        rr += e * e;
                    }
                    rr = std::sqrt(rr);
                    if (rr > 0.0)
                        for (int k = 0; k < d; ++k)
                            q[pj * d + k] =
                                q[pi * d + k] + (q[pj * d + k] - q[pi * d + k]) * dist / rr;
                }
            }
            ok = model.is_in_domain(q) && std::isfinite(model.value(q));
        }
        if (!ok) throw SamplingError("gradient-bound sampler exhausted 100x oversampling");

        model.gradient(q, g);
        const double lhs = nrm2(g);
        double rhs = rep.c1 * std::pow(nrm2(q), am1);
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) {
                double rr = 0.0;
                for (int k = 0; k < d; ++k) {
                    const double e = q[i * d + k] - q[j * d + k];
                    rr += e * e;
                }
                rhs += rep.c2 * std::pow(std::sqrt(rr), -bm1);
            }
        deficits.push_back(rhs - lhs);
    }

    const double need = *std::max_element(deficits.begin(), deficits.end());
    double D = 1.0;
    while (D < need && D <= 1e6) D *= 2.0;
    rep.D = D;
    rep.pass = D >= need && D <= 1e6;

    Vec margins(deficits.size());
    for (std::size_t i = 0; i < deficits.size(); ++i) margins[i] = D - deficits[i];
    std::sort(margins.begin(), margins.end());
    rep.worst_margin = margins.front();
    rep.margin_q10 = margins[margins.size() / 10];
    rep.margin_q50 = margins[margins.size() / 2];
    rep.margin_q90 = margins[(margins.size() * 9) / 10];
    return rep;
}

}  // namespace slg
