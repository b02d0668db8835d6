#include "core/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/quadrature.hpp"
#include "core/threads.hpp"

namespace slg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

double gaussian_cdf(double x, double variance) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}
}  // namespace

double GibbsReference::cdf_at(double x) const {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - grid.begin());
    if (j == 0) return 0.0;
    if (j >= grid.size()) return 1.0;
    const double x0 = grid[j - 1], x1 = grid[j];
    const double w = (x - x0) / (x1 - x0);
    return cdf[j - 1] + w * (cdf[j] - cdf[j - 1]);
}

double GibbsReference::sample_position(CounterRng& rng) const {
    if (nd != 1 || cdf.empty()) throw ConfigError("sample_position: 1D reference required");
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t j = static_cast<std::size_t>(it - cdf.begin());
    if (j == 0) return grid.front();
    if (j >= cdf.size()) return grid.back();
    const double c0 = cdf[j - 1], c1 = cdf[j];
    const double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
    return grid[j - 1] + w * (grid[j] - grid[j - 1]);
}

GibbsReference gibbs_reference(const PotentialModel& model, double temperature,
                               const GridSpec& spec) {
    if (temperature <= 0.0) throw ConfigError("gibbs_reference: temperature must be > 0");
    const int nd = model.dim();
    if (nd > 2) throw ConfigError("gibbs_reference: exact quadrature requires N*d <= 2");

    GibbsReference ref;
    ref.temperature = temperature;
    ref.nd = nd;
    ref.u_cap = spec.u_cap > 0.0 ? spec.u_cap : 60.0 * temperature;
    ref.z_p = std::pow(2.0 * kPi * temperature, 0.5 * model.particles() * model.space_dim());

    Vec lo, hi;
    model.sublevel_box(ref.u_cap, lo, hi);

    auto boltz1 = [&](double q) {
        Vec qq{q};
        if (!model.is_in_domain(qq)) return 0.0;
        const double u = model.value(qq);
        return std::isfinite(u) ? std::exp(-u / temperature) : 0.0;
    };

    if (nd == 1) {
        ref.lo = lo[0];
        ref.hi = hi[0];
        const int n = std::max(spec.n, 64);
        ref.grid.resize(n);
        ref.density.resize(n);
        ref.cdf.assign(n, 0.0);
        for (int k = 0; k < n; ++k)
            ref.grid[k] = ref.lo + (ref.hi - ref.lo) * k / (n - 1);
        // per-cell quadrature keeps the grid CDF consistent with z_q
        double acc = 0.0;
        for (int k = 1; k < n; ++k) {
            auto cell = integrate(boltz1, ref.grid[k - 1], ref.grid[k], 1e-10, 1e-300, 8);
            acc += cell.value;
            ref.cdf[k] = acc;
        }
        auto total = integrate(boltz1, ref.lo, ref.hi, 1e-10);
        if (!total.converged || !(total.value > 0.0))
            throw ConsistencyError(
                "gibbs_reference: position quadrature failed to converge (estimate " +
                std::to_string(total.value) + ", abs error " + std::to_string(total.abs_error) +
                ", " + std::to_string(total.evals) + " evaluations)");
        ref.z_q = total.value;
        for (int k = 0; k < n; ++k) {
            ref.density[k] = boltz1(ref.grid[k]) / ref.z_q;
            ref.cdf[k] /= acc;
        }
    } else {
        auto boltz2 = [&](Span q) {
            if (!model.is_in_domain(q)) return 0.0;
            const double u = model.value(q);
            return std::isfinite(u) ? std::exp(-u / temperature) : 0.0;
        };
        auto total = integrate_box(boltz2, lo, hi, 1e-8);
        if (!total.converged || !(total.value > 0.0))
            throw ConsistencyError(
                "gibbs_reference: 2D quadrature failed to converge (estimate " +
                std::to_string(total.value) + ", abs error " + std::to_string(total.abs_error) +
                ", " + std::to_string(total.evals) + " evaluations)");
        ref.z_q = total.value;
        const int n = std::min(std::max(spec.n, 32), 256);
        ref.grid_x.resize(n);
        ref.grid_y.resize(n);
        ref.density2 = Mat(n, n);
        for (int k = 0; k < n; ++k) {
            ref.grid_x[k] = lo[0] + (hi[0] - lo[0]) * k / (n - 1);
            ref.grid_y[k] = lo[1] + (hi[1] - lo[1]) * k / (n - 1);
        }
        Vec q(2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                q[0] = ref.grid_x[i];
                q[1] = ref.grid_y[j];
                ref.density2(i, j) = boltz2(q) / ref.z_q;
            }
        ref.lo = lo[0];
        ref.hi = hi[0];
    }

    // tail estimate: integral over {U > u_cap} of exp(-U/T)
    //   <= exp(-u_cap/(2T)) * integral exp(-U/(2T))
    {
        Vec lo2, hi2;
        model.sublevel_box(2.0 * ref.u_cap, lo2, hi2);
        double z2t;
        if (nd == 1) {
            z2t = integrate([&](double q) {
                      Vec qq{q};
                      if (!model.is_in_domain(qq)) return 0.0;
                      const double u = model.value(qq);
                      return std::isfinite(u) ? std::exp(-u / (2.0 * temperature)) : 0.0;
                  },
                            lo2[0], hi2[0], 1e-8)
                      .value;
        } else {
            z2t = integrate_box(
                      [&](Span q) {
                          if (!model.is_in_domain(q)) return 0.0;
                          const double u = model.value(q);
                          return std::isfinite(u) ? std::exp(-u / (2.0 * temperature)) : 0.0;
                      },
                      lo2, hi2, 1e-6)
                      .value;
        }
        ref.tail_bound = std::exp(-0.5 * ref.u_cap / temperature) * z2t;
    }
    return ref;
}

HistDistance histogram_distance(Span samples, const GibbsReference& ref, int bins) {
    if (ref.nd != 1) throw ConfigError("histogram_distance: 1D reference required");
    if (bins < 2) throw ConfigError("histogram_distance: bins must be >= 2");
    HistDistance out;
    const long long n = static_cast<long long>(samples.size());
    out.low_sample_warning = n < 10000;
    if (n == 0) {
        out.tv = 1.0;
        out.ks = 1.0;
        return out;
    }

    Vec counts(bins, 0.0);
    double outside = 0.0;
    const double width = (ref.hi - ref.lo) / bins;
    for (double x : samples) {
        if (x < ref.lo || x >= ref.hi) {
            outside += 1.0;
            continue;
        }
        int k = static_cast<int>((x - ref.lo) / width);
        k = std::clamp(k, 0, bins - 1);
        counts[k] += 1.0;
    }
    double tv = outside / n;  // reference mass outside the window is ~0
    for (int k = 0; k < bins; ++k) {
        const double emp = counts[k] / n;
        const double refmass = ref.bin_mass(ref.lo + k * width, ref.lo + (k + 1) * width);
        tv += std::abs(emp - refmass);
    }
    out.tv = 0.5 * tv;

    Vec sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double d = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double f = ref.cdf_at(sorted[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    out.ks = d;
    return out;
}

double ks_statistic_gaussian(Span samples, double variance) {
    Vec sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const long long n = static_cast<long long>(sorted.size());
    double d = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double f = gaussian_cdf(sorted[i], variance);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double ks_critical_value(double alpha, long long n) {
    double c;
    if (alpha <= 0.01)
        c = 1.62762;
    else if (alpha <= 0.05)
        c = 1.35810;
    else
        c = 1.22385;
    return c / std::sqrt(static_cast<double>(n));
}

DecayFit decay_fit(const std::vector<Vec>& series_per_replica, double dt_between_samples,
                   double burn_in_frac, double acf_floor, int min_lags, int max_lags) {
    DecayFit fit;
    if (series_per_replica.empty()) return fit;

    // pooled autocovariance over replicas, each mean-centered after burn-in
    long long shortest = std::numeric_limits<long long>::max();
    std::vector<Vec> chunks;
    for (const auto& s : series_per_replica) {
        const long long start = static_cast<long long>(burn_in_frac * s.size());
        if (static_cast<long long>(s.size()) - start < 8) continue;
        Vec x(s.begin() + start, s.end());
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
        for (double& v : x) v -= mean;
        shortest = std::min<long long>(shortest, static_cast<long long>(x.size()));
        chunks.push_back(std::move(x));
    }
    if (chunks.empty()) return fit;
    if (max_lags <= 0) max_lags = static_cast<int>(std::min<long long>(shortest / 5, 1000));
    max_lags = std::max(max_lags, 2);

    fit.acf.assign(max_lags + 1, 0.0);
    Vec num(max_lags + 1, 0.0);
    double den = 0.0;
    for (const auto& x : chunks) {
        const long long m = static_cast<long long>(x.size());
        for (long long t = 0; t < m; ++t) den += x[t] * x[t];
        for (int k = 0; k <= max_lags; ++k)
            for (long long t = 0; t + k < m; ++t) num[k] += x[t] * x[t + k];
    }
    if (!(den > 0.0)) return fit;
    for (int k = 0; k <= max_lags; ++k) fit.acf[k] = num[k] / den;
    fit.lag_times.resize(max_lags + 1);
    for (int k = 0; k <= max_lags; ++k) fit.lag_times[k] = k * dt_between_samples;

    // weighted LS of log acf over the usable lags (weights acf^2, the
    // delta-method variance stabilizer for log of a noisy positive value)
    Vec ts, ys, ws;
    for (int k = 1; k <= max_lags; ++k) {
        if (!(fit.acf[k] > acf_floor)) break;
        ts.push_back(fit.lag_times[k]);
        ys.push_back(std::log(fit.acf[k]));
        ws.push_back(fit.acf[k] * fit.acf[k]);
    }
    fit.lags_used = static_cast<int>(ts.size());
    if (fit.lags_used < 2) return fit;

    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sw += ws[i];
        swx += ws[i] * ts[i];
        swy += ws[i] * ys[i];
        swxx += ws[i] * ts[i] * ts[i];
        swxy += ws[i] * ts[i] * ys[i];
    }
    const double det = sw * swxx - swx * swx;
    if (std::abs(det) < 1e-300) return fit;
    const double slope = (sw * swxy - swx * swy) / det;
    const double intercept = (swy - slope * swx) / sw;
    fit.eta_hat = -slope;

    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = swy / sw;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double pred = intercept + slope * ts[i];
        ss_res += ws[i] * (ys[i] - pred) * (ys[i] - pred);
        ss_tot += ws[i] * (ys[i] - ybar) * (ys[i] - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    fit.reliable = fit.lags_used >= min_lags && fit.eta_hat > 0.0;
    return fit;
}

EquipartitionReport equipartition(const std::vector<Vec>& p2_per_replica, double temperature,
                                  int n, int d, double burn_in_frac) {
    EquipartitionReport rep;
    rep.target = temperature * n * d;
    Vec means;
    for (const auto& s : p2_per_replica) {
        const std::size_t start = static_cast<std::size_t>(burn_in_frac * s.size());
        if (s.size() - start < 1) continue;
        means.push_back(std::accumulate(s.begin() + start, s.end(), 0.0) / (s.size() - start));
    }
    if (means.size() < 2) return rep;
    const double m = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
    double var = 0.0;
    for (double v : means) var += (v - m) * (v - m);
    var /= (means.size() - 1);
    rep.mean_p2 = m;
    rep.std_error = std::sqrt(var / means.size());
    rep.z = rep.std_error > 0.0 ? (m - rep.target) / rep.std_error : kInf;
    rep.pass = std::abs(rep.z) <= 3.0;
    return rep;
}

MomentBoundReport moment_bound_check(const Vec& times, const std::vector<Vec>& log_w_per_replica,
                                     const std::vector<Vec>& h_per_replica, double log_w0,
                                     double h0, double c, double log_k, double gamma,
                                     double temperature, int n, int d) {
    MomentBoundReport rep;
    rep.c = c;
    rep.log_k = log_k;
    rep.t = times;
    const std::size_t reps = log_w_per_replica.size();
    if (reps < 2 || c <= 0.0) return rep;
    const std::size_t nt = times.size();
    rep.log_mean_w.assign(nt, 0.0);
    rep.log_bound_w.assign(nt, 0.0);
    rep.mean_h.assign(nt, 0.0);
    rep.bound_h.assign(nt, 0.0);

    rep.pass_w = true;
    rep.pass_h = true;
    const double c0 = gamma * temperature * n * d;  // L H <= gamma T N d
    for (std::size_t j = 0; j < nt; ++j) {
        // log-space mean and standard error of W across replicas
        double lse = -kInf, lse2 = -kInf;
        for (std::size_t r = 0; r < reps; ++r) {
            const double lw = log_w_per_replica[r][j];
            if (lw > 700.0) ++rep.overflow_flags;
            lse = log_add(lse, lw);
            lse2 = log_add(lse2, 2.0 * lw);
        }
        const double log_mean = lse - std::log(static_cast<double>(reps));
        const double log_mean_sq = lse2 - std::log(static_cast<double>(reps));
        double log_se = -kInf;
        if (log_mean_sq > 2.0 * log_mean) {
            const double log_var =
                log_sub(log_mean_sq, 2.0 * log_mean) +
                std::log(static_cast<double>(reps) / static_cast<double>(reps - 1));
            log_se = 0.5 * log_var - 0.5 * std::log(static_cast<double>(reps));
        }
        rep.log_mean_w[j] = log_mean;
        double bound = log_add(-c * times[j] + log_w0, log_k - std::log(c));
        bound = log_add(bound, std::log(3.0) + log_se);
        rep.log_bound_w[j] = bound;
        if (log_mean > bound + 1e-12) rep.pass_w = false;

        // H moment bound with plain arithmetic
        double mh = 0.0;
        for (std::size_t r = 0; r < reps; ++r) mh += h_per_replica[r][j];
        mh /= reps;
        double vh = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const double e = h_per_replica[r][j] - mh;
            vh += e * e;
        }
        vh /= (reps - 1);
        const double se_h = std::sqrt(vh / reps);
        rep.mean_h[j] = mh;
        rep.bound_h[j] = h0 + c0 * times[j] + 3.0 * se_h;
        if (mh > rep.bound_h[j] + 1e-12) rep.pass_h = false;
    }
    return rep;
}

GapScan test_function_gap(const PotentialModel& model, const SdeConfig& sde,
                          const GibbsReference& ref, const LyapunovParams* params,
                          const PhaseState& x0, const Vec& t_grid, int replicas,
                          const std::string& phi_name) {
    if (model.dim() != 1)
        throw ConfigError("test_function_gap: implemented for 1D position models");
    GapScan scan;
    scan.phi = phi_name;

    std::function<double(double, double)> phi;  // (q, p)
    if (phi_name == "one")
        phi = [](double, double) { return 1.0; };
    else if (phi_name == "tanh_q") {
        const double center = ref.grid[ref.grid.size() / 2];
        phi = [center](double q, double) { return std::tanh(q - center); };
    } else if (phi_name == "atan_q") {
        const double center = ref.grid[ref.grid.size() / 2];
        phi = [center](double q, double) { return std::atan(q - center) * 2.0 / kPi; };
    } else if (phi_name == "tanh_p")
        phi = [](double, double p) { return std::tanh(p); };
    else
        throw ConfigError("test_function_gap: unknown test function '" + phi_name + "'");

    // || phi ||_W normalization from a sampled sup of |phi| / (1 + W)
    if (params) {
        CounterRng rng(sde.seed, 0x04A9);
        double sup = 0.0;
        for (int i = 0; i < 2000; ++i) {
            Vec q{ref.sample_position(rng)};
            Vec p{std::sqrt(sde.temperature > 0 ? sde.temperature : 1.0) * rng.normal()};
            const double lw = eval_log_w(*params, model, q, p);
            const double denom = lw > 700.0 ? kInf : 1.0 + std::exp(lw);
            sup = std::max(sup, std::abs(phi(q[0], p[0])) / denom);
        }
        if ((!(sup > 0.0) || !std::isfinite(sup)) && phi_name != "one")
            throw ConfigError("test_function_gap: test function rejected (no finite W-norm)");
        scan.norm = sup > 0.0 ? sup : 1.0;
    }

    // mu(phi) by quadrature: position part against exp(-U/T)/Z, momentum
    // part against the Gaussian marginal
    auto qpart = integrate(
        [&](double q) {
            Vec qq{q};
            if (!model.is_in_domain(qq)) return 0.0;
            const double u = model.value(qq);
            if (!std::isfinite(u)) return 0.0;
            // momentum integral of phi(q, p) under N(0, T)
            const double T = sde.temperature;
            auto pint = integrate(
                [&](double p) {
                    return phi(q, p) * std::exp(-0.5 * p * p / T) / std::sqrt(2.0 * kPi * T);
                },
                -10.0 * std::sqrt(T), 10.0 * std::sqrt(T), 1e-9);
            return pint.value * std::exp(-u / ref.temperature) / ref.z_q;
        },
        ref.lo, ref.hi, 1e-8);
    scan.mu_phi = qpart.value;

    // one ensemble run to max t; record phi at the nearest sampled times
    const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
    SdeConfig run = sde;
    run.n_steps = static_cast<long long>(std::llround(t_max / sde.dt));
    run.sample_every = std::max<long long>(1, run.n_steps / 2000);
    std::vector<Observable> obs{{"phi", [phi](const PotentialModel&, const PhaseState& x) {
                                     return phi(x.q[0], x.p[0]);
                                 }}};
    auto trajs = ensemble(model, run, {x0}, replicas, obs, nullptr);
    const int phi_col = 3;  // H, U, p2, phi

    for (double t : t_grid) {
        // nearest recorded index
        const auto& times = trajs[0].times;
        std::size_t jbest = 0;
        double dbest = kInf;
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double dd = std::abs(times[j] - t);
            if (dd < dbest) {
                dbest = dd;
                jbest = j;
            }
        }
        double mean = 0.0, var = 0.0;
        for (const auto& tr : trajs) mean += tr.records(static_cast<int>(jbest), phi_col);
        mean /= trajs.size();
        for (const auto& tr : trajs) {
            const double e = tr.records(static_cast<int>(jbest), phi_col) - mean;
            var += e * e;
        }
        var /= (trajs.size() > 1 ? trajs.size() - 1 : 1);
        GapPoint gp;
        gp.t = times[jbest];
        gp.gap = (mean - scan.mu_phi) / scan.norm;
        gp.std_error = std::sqrt(var / trajs.size()) / scan.norm;
        scan.points.push_back(gp);
    }

    // exponential trend of |gap| over the informative points
    Vec ts, ys;
    for (const auto& gp : scan.points)
        if (std::abs(gp.gap) > 2.0 * gp.std_error && std::abs(gp.gap) > 1e-12) {
            ts.push_back(gp.t);
            ys.push_back(std::log(std::abs(gp.gap)));
        }
    if (ts.size() >= 3) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            sx += ts[i];
            sy += ys[i];
            sxx += ts[i] * ts[i];
            sxy += ts[i] * ys[i];
        }
        const double det = m * sxx - sx * sx;
        if (std::abs(det) > 1e-300) {
            const double slope = (m * sxy - sx * sy) / det;
            const double intercept = (sy - slope * sx) / m;
            scan.eta_hat = -slope;
            double ss_res = 0, ss_tot = 0;
            const double ybar = sy / m;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const double pred = intercept + slope * ts[i];
                ss_res += (ys[i] - pred) * (ys[i] - pred);
                ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
            }
            scan.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
            scan.fit_reliable = true;
        }
    }
    return scan;
}

OverlapReport minorization_overlap(const PotentialModel& model, const SdeConfig& sde,
                                   const LyapunovParams& params, double log_r, double t0,
                                   int starts, int replicas_per_start, int bins,
                                   std::uint64_t seed, double floor) {
    OverlapReport rep;
    rep.starts = starts;
    rep.replicas = replicas_per_start;
    rep.bins = bins;
    rep.floor = floor;
    if (model.dim() != 1)
        throw ConfigError("minorization_overlap: implemented for 1D position models");

    // starts drawn from C_R = {W <= R}, Gibbs-weighted so they are typical
    // points of the level set rather than its energetic fringe
    std::vector<PhaseState> x0s;
    CounterRng rng(seed, 0x0E71A9);
    const double u_guess = std::max(log_r / params.b, 1e-3);
    const double u_floor = model.value(model.anchor());
    const double t_eff = sde.temperature > 0.0 ? sde.temperature : params.temperature;
    for (int s = 0; s < starts; ++s) {
        bool found = false;
        for (int attempt = 0; attempt < 400 && !found; ++attempt) {
            Vec q;
            try {
                q = model.sample_sublevel(u_guess, rng);
            } catch (const SamplingError&) {
                continue;
            }
            const double u = model.value(q);
            if (t_eff > 0.0 && rng.uniform() > std::exp(-(u - u_floor) / t_eff)) continue;
            Vec p{std::sqrt(std::max(t_eff, 0.1)) * rng.normal()};
            if (eval_log_w(params, model, q, p) <= log_r) {
                x0s.push_back({q, p});
                found = true;
            }
        }
        if (!found) throw SamplingError("minorization_overlap: no start found in {W <= R}");
    }

    SdeConfig run = sde;
    run.n_steps = std::max<long long>(1, static_cast<long long>(std::llround(t0 / sde.dt)));
    run.sample_every = run.n_steps;

    // endpoint clouds per start
    std::vector<Vec> endq(starts), endp(starts);
    for (int s = 0; s < starts; ++s) {
        SdeConfig rs = run;
        rs.seed = CounterRng::derive(sde.seed, 0xA110C + s);
        auto trajs = ensemble(model, rs, {x0s[s]}, replicas_per_start, {}, nullptr);
        for (const auto& tr : trajs) {
            endq[s].push_back(tr.final_state.q[0]);
            endp[s].push_back(tr.final_state.p[0]);
        }
    }

    double qlo = kInf, qhi = -kInf, plo = kInf, phi_ = -kInf;
    for (int s = 0; s < starts; ++s)
        for (std::size_t i = 0; i < endq[s].size(); ++i) {
            qlo = std::min(qlo, endq[s][i]);
            qhi = std::max(qhi, endq[s][i]);
            plo = std::min(plo, endp[s][i]);
            phi_ = std::max(phi_, endp[s][i]);
        }
    const double qw = std::max(qhi - qlo, 1e-12), pw = std::max(phi_ - plo, 1e-12);

    std::vector<Vec> mass(starts, Vec(static_cast<std::size_t>(bins) * bins, 0.0));
    for (int s = 0; s < starts; ++s) {
        for (std::size_t i = 0; i < endq[s].size(); ++i) {
            int bq = std::clamp(static_cast<int>((endq[s][i] - qlo) / qw * bins), 0, bins - 1);
            int bp = std::clamp(static_cast<int>((endp[s][i] - plo) / pw * bins), 0, bins - 1);
            mass[s][static_cast<std::size_t>(bq) * bins + bp] += 1.0 / endq[s].size();
        }
    }
    double overlap = 0.0;
    for (std::size_t cell = 0; cell < mass[0].size(); ++cell) {
        double m = kInf;
        for (int s = 0; s < starts; ++s) m = std::min(m, mass[s][cell]);
        overlap += m;
    }
    rep.overlap = overlap;
    rep.reliable = replicas_per_start >= std::max(100, 10 * bins);
    rep.pass = rep.reliable && overlap >= floor;
    return rep;
}

}  // namespace slg
