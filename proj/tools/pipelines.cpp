#include "pipelines.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>
#include <slangevin.h>

#include "writers.hpp"

namespace slgcli {

namespace {

using nlohmann::json;

struct ModelDeleter {
    void operator()(slg_model* m) const { slg_model_free(m); }
};
struct LyapDeleter {
    void operator()(slg_lyapunov* l) const { slg_lyapunov_free(l); }
};
struct TrajDeleter {
    void operator()(slg_traj* t) const { slg_traj_free(t); }
};
struct GibbsDeleter {
    void operator()(slg_gibbs* g) const { slg_gibbs_free(g); }
};
struct PathDeleter {
    void operator()(slg_path* p) const { slg_path_free(p); }
};
struct DriftDeleter {
    void operator()(slg_drift_report* r) const { slg_drift_report_free(r); }
};
struct AdmissDeleter {
    void operator()(slg_admissibility* a) const { slg_admissibility_free(a); }
};

using ModelPtr = std::unique_ptr<slg_model, ModelDeleter>;
using LyapPtr = std::unique_ptr<slg_lyapunov, LyapDeleter>;
using TrajPtr = std::unique_ptr<slg_traj, TrajDeleter>;
using GibbsPtr = std::unique_ptr<slg_gibbs, GibbsDeleter>;

[[noreturn]] void fail_from_capi(const std::string& op) {
    throw VerificationFailure(op + ": " + slg_last_error());
}

ModelPtr build_model(RunConfig& cfg) {
    const std::string family = cfg.require_string("potential", "family");
    slg_model* m = nullptr;
    if (family == "poly_confine") {
        m = slg_model_poly_confine(cfg.get_double("potential", "A", 1.0),
                                   cfg.get_double("potential", "alpha", 2.0),
                                   static_cast<int>(cfg.get_int("potential", "N", 1)),
                                   static_cast<int>(cfg.get_int("potential", "d", 1)));
    } else if (family == "singular_pair_1d") {
        m = slg_model_singular_pair_1d(
            cfg.get_double("potential", "A", 1.0), cfg.get_double("potential", "alpha", 2.0),
            cfg.get_double("potential", "B", 1.0), cfg.get_double("potential", "beta", 1.0));
    } else if (family == "interacting") {
        double B = cfg.get_double("potential", "B", 0.0);
        if (cfg.has("potential", "c0")) B = cfg.get_double("potential", "c0", B);
        m = slg_model_interacting(cfg.get_double("potential", "A", 1.0),
                                  cfg.get_double("potential", "alpha", 2.0), B,
                                  cfg.get_double("potential", "beta", 12.0),
                                  cfg.get_double("potential", "c1", 0.0),
                                  static_cast<int>(cfg.get_int("potential", "N", 2)),
                                  static_cast<int>(cfg.get_int("potential", "d", 1)));
    } else if (family == "composite") {
        const auto A = cfg.get_array("potential", "A", {1.0});
        const auto alpha = cfg.get_array("potential", "alpha", {2.0});
        const auto B = cfg.get_array("potential", "B", {});
        const auto beta = cfg.get_array("potential", "beta", {});
        m = slg_model_composite(A.data(), alpha.data(), static_cast<int>(A.size()), B.data(),
                                beta.data(), static_cast<int>(B.size()),
                                static_cast<int>(cfg.get_int("potential", "N", 1)),
                                static_cast<int>(cfg.get_int("potential", "d", 1)));
    } else {
        throw UsageError("unknown potential.family '" + family + "'");
    }
    if (!m) throw UsageError(std::string("potential: ") + slg_last_error());
    return ModelPtr(m);
}

slg_sde build_sde(RunConfig& cfg) {
    slg_sde sde;
    slg_sde_defaults(&sde);
    sde.gamma = cfg.get_double("sde", "gamma", sde.gamma);
    sde.temperature = cfg.get_double("sde", "temperature", sde.temperature);
    sde.dt = cfg.get_double("sde", "dt", sde.dt);
    sde.n_steps = cfg.get_int("sde", "n_steps", sde.n_steps);
    const std::string scheme = cfg.get_string("sde", "scheme", "split_ou");
    if (scheme == "split_ou")
        sde.scheme = SLG_SCHEME_SPLIT_OU;
    else if (scheme == "euler_maruyama")
        sde.scheme = SLG_SCHEME_EULER_MARUYAMA;
    else
        throw UsageError("sde.scheme must be split_ou or euler_maruyama");
    sde.seed = static_cast<uint64_t>(cfg.get_int("sde", "seed", 0));
    sde.sample_every = cfg.get_int("sde", "sample_every", 1);
    sde.energy_jump_cap = cfg.get_double("sde", "energy_jump_cap", sde.energy_jump_cap);
    sde.max_dt_shrink = static_cast<int>(cfg.get_int("sde", "max_dt_shrink", sde.max_dt_shrink));
    return sde;
}

std::vector<double> anchor_of(const slg_model* m) {
    std::vector<double> q(static_cast<std::size_t>(slg_model_dim(m)));
    if (slg_model_anchor(m, q.data()) != SLG_OK) fail_from_capi("anchor");
    return q;
}

// x0 = "q..., p..." (2*dim values) or default (anchor, 0)
void initial_state(RunConfig& cfg, const std::string& section, const std::string& key,
                   const slg_model* m, std::vector<double>& q, std::vector<double>& p) {
    const int dim = slg_model_dim(m);
    std::vector<double> def = anchor_of(m);
    def.resize(2 * static_cast<std::size_t>(dim), 0.0);
    const auto x = cfg.get_array(section, key, def);
    if (static_cast<int>(x.size()) != 2 * dim)
        throw UsageError(section + "." + key + " must hold 2*N*d = " + std::to_string(2 * dim) +
                         " values (q then p)");
    q.assign(x.begin(), x.begin() + dim);
    p.assign(x.begin() + dim, x.end());
}

LyapPtr select_lyapunov(RunConfig& cfg, const slg_model* m, const slg_sde& sde) {
    const double b = cfg.require_double("lyapunov", "b");
    slg_lyapunov* l = slg_select_params(
        m, sde.gamma, sde.temperature, b, cfg.get_double("lyapunov", "kappa_slack", 1e-3),
        cfg.get_double("lyapunov", "r1_initial", 1.0), cfg.get_int("lyapunov", "samples", 100000),
        sde.seed + 1);
    if (!l) fail_from_capi("select_params");
    return LyapPtr(l);
}

struct TrajData {
    std::vector<double> times;
    std::vector<std::string> columns;
    std::vector<double> records;  // rows x cols
    long long rows = 0;
    int cols = 0;
    int column(const std::string& name) const {
        for (int c = 0; c < cols; ++c)
            if (columns[static_cast<std::size_t>(c)] == name) return c;
        return -1;
    }
    double at(long long row, int col) const {
        return records[static_cast<std::size_t>(row) * cols + col];
    }
};

TrajData fetch(const slg_traj* t) {
    TrajData d;
    d.rows = slg_traj_rows(t);
    d.cols = slg_traj_cols(t);
    for (int c = 0; c < d.cols; ++c) d.columns.push_back(slg_traj_column_name(t, c));
    d.times.resize(static_cast<std::size_t>(d.rows));
    d.records.resize(static_cast<std::size_t>(d.rows) * d.cols);
    if (slg_traj_copy(t, d.times.data(), d.records.data()) != SLG_OK) fail_from_capi("traj_copy");
    return d;
}

void write_traj_csv(OutputDir& out, const std::string& name, const TrajData& d) {
    std::vector<std::string> header{"t"};
    for (const auto& c : d.columns) header.push_back(c);
    CsvWriter csv(out.path(name), header);
    std::vector<double> row(static_cast<std::size_t>(d.cols) + 1);
    for (long long r = 0; r < d.rows; ++r) {
        row[0] = d.times[static_cast<std::size_t>(r)];
        for (int c = 0; c < d.cols; ++c) row[static_cast<std::size_t>(c) + 1] = d.at(r, c);
        csv.row(row);
    }
    csv.close();
}

TrajData read_traj_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open trajectory csv: " + path);
    TrajData d;
    std::string line;
    if (!std::getline(in, line)) throw UsageError("empty trajectory csv: " + path);
    {
        std::stringstream ss(line);
        std::string cell;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first)
                first = false;  // "t"
            else
                d.columns.push_back(cell);
        }
    }
    d.cols = static_cast<int>(d.columns.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int c = -1;
        while (std::getline(ss, cell, ',')) {
            if (c < 0)
                d.times.push_back(std::stod(cell));
            else
                d.records.push_back(std::stod(cell));
            ++c;
        }
        if (c != d.cols) throw UsageError("ragged trajectory csv: " + path);
    }
    d.rows = static_cast<long long>(d.times.size());
    return d;
}

// ------------------------------------------------------------------
// schema: reject unknown keys by name before any work happens

const std::map<std::string, std::vector<std::string>> kFamilyKeys{
    {"poly_confine", {"family", "A", "alpha", "N", "d"}},
    {"singular_pair_1d", {"family", "A", "alpha", "B", "beta"}},
    {"interacting", {"family", "A", "alpha", "B", "beta", "c0", "c1", "N", "d"}},
    {"composite", {"family", "A", "alpha", "B", "beta", "N", "d"}},
};

void validate_schema(const RunConfig& cfg, const std::string& family) {
    static const std::map<std::string, std::vector<std::string>> sections{
        {"sde",
         {"gamma", "temperature", "dt", "n_steps", "scheme", "seed", "sample_every",
          "energy_jump_cap", "max_dt_shrink", "replicas", "x0"}},
        {"lyapunov", {"b", "kappa_slack", "r1_initial", "samples"}},
        {"control", {"x0", "x1", "t_final", "waypoints", "grid_n"}},
        {"diagnostics",
         {"trajectories", "bins", "burn_in", "observable", "t0", "starts",
          "replicas_per_start", "overlap_bins", "overlap_floor", "log_r", "c", "log_k", "u_cap",
          "grid_n", "samples", "t_grid", "gap_replicas", "phi"}},
        {"output", {"dir", "format"}},
    };
    const auto fam = kFamilyKeys.find(family);
    std::string bad;
    for (const auto& key : cfg.keys()) {
        const auto dot = key.find('.');
        const std::string sec = key.substr(0, dot);
        const std::string name = key.substr(dot + 1);
        bool known = false;
        if (sec == "potential") {
            if (fam != kFamilyKeys.end())
                for (const auto& k : fam->second) known = known || k == name;
        } else {
            const auto it = sections.find(sec);
            if (it != sections.end())
                for (const auto& k : it->second) known = known || k == name;
        }
        if (!known) bad += (bad.empty() ? "" : ", ") + key;
    }
    if (!bad.empty()) throw UsageError("unknown config key(s): " + bad);
}

// ------------------------------------------------------------------
// subcommands

int pipeline_simulate(RunConfig& cfg, OutputDir& out) {
    auto model = build_model(cfg);
    const slg_sde sde = build_sde(cfg);
    const int replicas = static_cast<int>(cfg.get_int("sde", "replicas", 1));
    std::vector<double> q0, p0;
    initial_state(cfg, "sde", "x0", model.get(), q0, p0);

    LyapPtr lyap;
    if (cfg.has("lyapunov", "b")) lyap = select_lyapunov(cfg, model.get(), sde);

    const int record_coords = slg_model_dim(model.get()) == 1 ? 1 : 0;
    std::vector<slg_traj*> raw(static_cast<std::size_t>(replicas), nullptr);
    if (slg_ensemble(model.get(), &sde, q0.data(), p0.data(),
                     static_cast<int>(q0.size()), lyap.get(), replicas, record_coords,
                     raw.data()) != SLG_OK)
        fail_from_capi("simulate");
    std::vector<TrajPtr> trajs;
    for (auto* t : raw) trajs.emplace_back(t);

    json summary;
    summary["replicas"] = replicas;
    bool any_exit = false;
    for (int r = 0; r < replicas; ++r) {
        const TrajData d = fetch(trajs[static_cast<std::size_t>(r)].get());
        char name[32];
        std::snprintf(name, sizeof name, "traj_%03d.csv", r);
        write_traj_csv(out, replicas == 1 ? "traj.csv" : name, d);
        auto* traj = trajs[static_cast<std::size_t>(r)].get();
        const bool exit_flag = slg_traj_exit_flag(traj) != 0;
        any_exit = any_exit || exit_flag;
        json jt{{"replica", r},
                {"exit_flag", exit_flag},
                {"shrink_events", slg_traj_shrink_events(traj)},
                {"rows", d.rows}};
        if (exit_flag) {
            jt["fail_step"] = slg_traj_fail_step(traj);
            jt["fail_message"] = slg_traj_fail_message(traj);
        }
        summary["trajectories"].push_back(jt);
    }
    summary["exit_flag"] = any_exit;
    out.write_json("summary.json", summary);
    if (any_exit)
        throw VerificationFailure("simulate: a trajectory hit the step-shrink budget (exit_flag)");
    return 0;
}

int pipeline_verify_drift(RunConfig& cfg, OutputDir& out) {
    auto model = build_model(cfg);
    const slg_sde sde = build_sde(cfg);
    auto lyap = select_lyapunov(cfg, model.get(), sde);

    std::unique_ptr<slg_drift_report, DriftDeleter> rep(
        slg_verify_drift(lyap.get(), model.get(), cfg.get_int("lyapunov", "samples", 100000),
                         sde.seed + 2));
    if (!rep) fail_from_capi("verify_drift");

    double c_hat, log_k, worst;
    long long samples, violations;
    int pass;
    slg_drift_report_get(rep.get(), &c_hat, &log_k, &samples, &violations, &worst, &pass);
    double b, kappa, C, r1, r2;
    slg_lyapunov_get(lyap.get(), &b, &kappa, &C, &r1, &r2);

    const std::string fmt = cfg.get_string("output", "format", "json");
    std::vector<std::pair<std::string, double>> kv{
        {"b", b},          {"kappa", kappa},
        {"C", C},          {"r1", r1},
        {"r2", r2},        {"c_hat", c_hat},
        {"log_k_hat", log_k}, {"k_hat", std::exp(log_k)},
        {"samples", static_cast<double>(samples)},
        {"violations", static_cast<double>(violations)},
        {"worst_margin", worst},
        {"pass", static_cast<double>(pass)}};
    {
        long long hist[32];
        const int nb = slg_drift_margin_hist(rep.get(), hist, 32);
        for (int i = 0; i < nb; ++i) {
            char key[40];
            std::snprintf(key, sizeof key, "margin_hist_%02d", i);
            kv.emplace_back(key, static_cast<double>(hist[i]));
        }
    }
    if (fmt == "csv") {
        std::string text = "key,value\n";
        for (const auto& [k, v] : kv) text += k + "," + format_g17(v) + "\n";
        out.write_text("drift_report.csv", text);
    } else {
        json doc;
        for (const auto& [k, v] : kv) doc[k] = v;
        out.write_json("drift_report.json", doc);
    }

    if (!pass) {
        const int dim = slg_model_dim(model.get());
        const int n_wit = slg_drift_witness_count(rep.get());
        std::vector<std::string> header{"ratio", "log_w"};
        for (int i = 0; i < dim; ++i) header.push_back("q" + std::to_string(i + 1));
        for (int i = 0; i < dim; ++i) header.push_back("p" + std::to_string(i + 1));
        CsvWriter csv(out.path("witnesses.csv"), header);
        std::vector<double> q(static_cast<std::size_t>(dim)), p(static_cast<std::size_t>(dim));
        for (int i = 0; i < n_wit; ++i) {
            double ratio, log_w;
            slg_drift_witness(rep.get(), i, q.data(), p.data(), &ratio, &log_w);
            std::vector<double> row{ratio, log_w};
            row.insert(row.end(), q.begin(), q.end());
            row.insert(row.end(), p.begin(), p.end());
            csv.row(row);
        }
        csv.close();
        throw VerificationFailure("verify_drift: " + std::to_string(violations) +
                                  " drift violations over " + std::to_string(samples) +
                                  " fresh samples");
    }
    return 0;
}

int pipeline_check_admissible(RunConfig& cfg, OutputDir& out) {
    auto model = build_model(cfg);
    const double temperature = cfg.get_double("sde", "temperature", 1.0);
    const uint64_t seed = static_cast<uint64_t>(cfg.get_int("sde", "seed", 0));

    std::unique_ptr<slg_admissibility, AdmissDeleter> rep(
        slg_probe_admissibility(model.get(), temperature, seed));
    if (!rep) fail_from_capi("probe_admissibility");

    json doc;
    const int n_seq = slg_admissibility_sequences(rep.get());
    CsvWriter csv(out.path("sequences.csv"), {"sequence", "k", "u", "grad_norm", "ratio"});
    for (int i = 0; i < n_seq; ++i) {
        char label[64];
        int valid, pass, n_points;
        slg_admissibility_sequence(rep.get(), i, label, sizeof label, &valid, &pass, &n_points);
        std::vector<double> u(static_cast<std::size_t>(n_points)), g(u.size()), ratio(u.size());
        slg_admissibility_sequence_data(rep.get(), i, u.data(), g.data(), ratio.data());
        doc["sequences"].push_back(
            {{"label", label}, {"valid", valid != 0}, {"pass", pass != 0}});
        for (int k = 0; k < n_points; ++k)
            csv.row({static_cast<double>(i), static_cast<double>(k), u[static_cast<std::size_t>(k)],
                     g[static_cast<std::size_t>(k)], ratio[static_cast<std::size_t>(k)]});
    }
    csv.close();

    double integral, se;
    int converged, by_quad;
    slg_admissibility_integral(rep.get(), &integral, &se, &converged, &by_quad);
    doc["integral"] = {{"estimate", integral},
                       {"std_error", se},
                       {"converged", converged != 0},
                       {"by_quadrature", by_quad != 0}};
    const bool pass = slg_admissibility_pass(rep.get()) != 0;
    doc["pass"] = pass;
    doc["note"] = "numerical evidence, not proof";

    bool bound_pass = true;
    if (cfg.get_string("potential", "family", "") == "interacting" &&
        cfg.get_int("potential", "N", 2) >= 1) {
        double c1, c2, D, worst;
        int bpass;
        if (slg_gradient_lower_bound(model.get(), cfg.get_int("diagnostics", "samples", 100000),
                                     seed + 3, &c1, &c2, &D, &worst, &bpass) != SLG_OK)
            fail_from_capi("gradient_lower_bound");
        doc["gradient_lower_bound"] =
            {{"c1", c1}, {"c2", c2}, {"D", D}, {"worst_margin", worst}, {"pass", bpass != 0}};
        bound_pass = bpass != 0;
    }
    out.write_json("admissibility.json", doc);
    if (!pass || !bound_pass)
        throw VerificationFailure("check_admissible: probes reported a fail verdict");
    return 0;
}

int pipeline_control_path(RunConfig& cfg, OutputDir& out) {
    auto model = build_model(cfg);
    const slg_sde sde = build_sde(cfg);
    const int dim = slg_model_dim(model.get());
    std::vector<double> q0, p0, q1, p1;
    initial_state(cfg, "control", "x0", model.get(), q0, p0);
    {
        std::vector<double> def = anchor_of(model.get());
        def.resize(2 * static_cast<std::size_t>(dim), 0.0);
        const auto x = cfg.get_array("control", "x1", def);
        if (static_cast<int>(x.size()) != 2 * dim)
            throw UsageError("control.x1 must hold 2*N*d values (q then p)");
        q1.assign(x.begin(), x.begin() + dim);
        p1.assign(x.begin() + dim, x.end());
    }
    const double t_final = cfg.get_double("control", "t_final", 1.0);
    const auto way_rows = cfg.get_matrix("control", "waypoints");
    std::vector<double> ways;
    for (const auto& row : way_rows) {
        if (static_cast<int>(row.size()) != dim)
            throw UsageError("control.waypoints rows must hold N*d values");
        ways.insert(ways.end(), row.begin(), row.end());
    }

    std::unique_ptr<slg_path, PathDeleter> path(
        slg_build_path(model.get(), q0.data(), p0.data(), q1.data(), p1.data(), dim, t_final,
                       ways.empty() ? nullptr : ways.data(), static_cast<int>(way_rows.size())));
    if (!path) fail_from_capi("build_path");

    const int n_grid = static_cast<int>(cfg.get_int("control", "grid_n", 1025));
    std::vector<std::string> header{"s"};
    for (int i = 0; i < dim; ++i) header.push_back("phi" + std::to_string(i + 1));
    for (int i = 0; i < dim; ++i) header.push_back("xi" + std::to_string(i + 1));
    CsvWriter csv(out.path("path.csv"), header);
    std::vector<double> phi(static_cast<std::size_t>(dim)), dphi(phi), ddphi(phi), xi(phi);
    for (int k = 0; k < n_grid; ++k) {
        const double s = t_final * k / (n_grid - 1);
        slg_path_eval(path.get(), s, phi.data(), dphi.data(), ddphi.data());
        if (slg_control_xi(model.get(), path.get(), sde.gamma, sde.temperature, s, xi.data()) !=
            SLG_OK)
            fail_from_capi("control_xi");
        std::vector<double> row{s};
        row.insert(row.end(), phi.begin(), phi.end());
        row.insert(row.end(), xi.begin(), xi.end());
        csv.row(row);
    }
    csv.close();

    double err, tol, max_u, cost;
    int pass;
    if (slg_verify_reachability(model.get(), q0.data(), p0.data(), q1.data(), p1.data(), dim,
                                t_final, sde.gamma, sde.temperature,
                                ways.empty() ? nullptr : ways.data(),
                                static_cast<int>(way_rows.size()), &err, &tol, &max_u, &cost,
                                &pass) != SLG_OK)
        fail_from_capi("verify_reachability");
    out.write_json("control_summary.json", json{{"endpoint_error", err},
                                                {"tolerance", tol},
                                                {"max_u", max_u},
                                                {"cost", cost},
                                                {"pass", pass != 0}});
    if (!pass)
        throw VerificationFailure("verify_reachability: endpoint error " + format_g17(err) +
                                  " above tolerance " + format_g17(tol));
    return 0;
}

int pipeline_gibbs_ref(RunConfig& cfg, OutputDir& out) {
    auto model = build_model(cfg);
    const double temperature = cfg.get_double("sde", "temperature", 1.0);
    GibbsPtr ref(slg_gibbs_reference(model.get(), temperature,
                                     cfg.get_double("diagnostics", "u_cap", 0.0),
                                     static_cast<int>(cfg.get_int("diagnostics", "grid_n", 4096))));
    if (!ref) fail_from_capi("gibbs_reference");
    double z_q, z_p, u_cap, tail;
    int grid_len;
    slg_gibbs_get(ref.get(), &z_q, &z_p, &u_cap, &tail, &grid_len);
    out.write_json("gibbs_summary.json", json{{"z_q", z_q},
                                              {"z_p", z_p},
                                              {"u_cap", u_cap},
                                              {"tail_bound", tail},
                                              {"grid_len", grid_len}});
    if (grid_len > 0) {
        std::vector<double> q(static_cast<std::size_t>(grid_len)), density(q.size()), cdf(q.size());
        slg_gibbs_grid(ref.get(), q.data(), density.data(), cdf.data());
        CsvWriter csv(out.path("gibbs.csv"), {"q", "density", "cdf"});
        for (int k = 0; k < grid_len; ++k)
            csv.row({q[static_cast<std::size_t>(k)], density[static_cast<std::size_t>(k)],
                     cdf[static_cast<std::size_t>(k)]});
        csv.close();
    }
    return 0;
}

int pipeline_diagnose(RunConfig& cfg, OutputDir& out) {
    auto model = build_model(cfg);
    const slg_sde sde = build_sde(cfg);
    const int dim = slg_model_dim(model.get());
    const int n_particles = static_cast<int>(cfg.get_int("potential", "N", 1));
    const int space_dim = dim / std::max(n_particles, 1);

    const auto paths = cfg.get_string_array("diagnostics", "trajectories", {});
    if (paths.empty()) throw UsageError("diagnose needs diagnostics.trajectories (csv paths)");
    std::vector<TrajData> trajs;
    for (const auto& p : paths) trajs.push_back(read_traj_csv(p));
    const double burn_in = cfg.get_double("diagnostics", "burn_in", 0.5);
    const int bins = static_cast<int>(cfg.get_int("diagnostics", "bins", 100));

    json summary;
    bool failed_check = false;

    // equipartition from the p2 column (needs independent replicas for a
    // sound standard error)
    if (trajs.size() >= 2) {
        const int col = trajs[0].column("p2");
        const long long len = trajs[0].rows;
        std::vector<double> flat;
        for (const auto& t : trajs)
            for (long long r = 0; r < len; ++r) flat.push_back(t.at(r, col));
        double mean, se, z;
        int pass;
        slg_equipartition(flat.data(), static_cast<int>(trajs.size()), len, sde.temperature,
                          n_particles, space_dim, burn_in, &mean, &se, &z, &pass);
        summary["equipartition_z"] = z;
        summary["mean_p2"] = mean;
    } else {
        summary["equipartition_z"] = nullptr;
    }

    // autocorrelation decay of the chosen observable
    {
        const std::string obs = cfg.get_string("diagnostics", "observable", "H");
        const int col = trajs[0].column(obs);
        if (col < 0) throw UsageError("diagnose: observable column '" + obs + "' not found");
        const long long len = trajs[0].rows;
        std::vector<double> flat;
        for (const auto& t : trajs)
            for (long long r = 0; r < len; ++r) flat.push_back(t.at(r, col));
        const double dt_between = trajs[0].times.size() > 1
                                      ? trajs[0].times[1] - trajs[0].times[0]
                                      : sde.dt;
        double eta, r2;
        int lags, reliable;
        std::vector<double> acf(1001);
        slg_decay_fit(flat.data(), static_cast<int>(trajs.size()), len, dt_between, burn_in,
                      &eta, &r2, &lags, &reliable, acf.data(), static_cast<int>(acf.size()));
        summary["eta_hat"] = eta;
        summary["r_squared"] = r2;
        summary["acf_lags_used"] = lags;
        CsvWriter csv(out.path("acf.csv"), {"lag_time", "acf"});
        for (int k = 0; k <= std::min(lags * 3 + 10, 1000); ++k)
            csv.row({k * dt_between, acf[static_cast<std::size_t>(k)]});
        csv.close();
    }

    // position-marginal TV/KS against the quadrature reference (1D models)
    GibbsPtr ref;
    if (dim == 1) {
        ref.reset(slg_gibbs_reference(model.get(), sde.temperature,
                                      cfg.get_double("diagnostics", "u_cap", 0.0),
                                      static_cast<int>(cfg.get_int("diagnostics", "grid_n", 4096))));
        if (!ref) fail_from_capi("gibbs_reference");
        const int qcol = trajs[0].column("q1");
        const int pcol = trajs[0].column("p1");
        if (qcol >= 0) {
            std::vector<double> qs, ps;
            for (const auto& t : trajs) {
                const long long start = static_cast<long long>(burn_in * t.rows);
                for (long long r = start; r < t.rows; ++r) {
                    qs.push_back(t.at(r, qcol));
                    if (pcol >= 0) ps.push_back(t.at(r, pcol));
                }
            }
            double tv, ks;
            slg_histogram_distance(qs.data(), static_cast<long long>(qs.size()), ref.get(), bins,
                                   &tv, &ks);
            summary["tv"] = tv;
            summary["ks"] = ks;
            if (!ps.empty()) {
                const double ksp =
                    slg_ks_gaussian(ps.data(), static_cast<long long>(ps.size()), sde.temperature);
                summary["ks_momentum"] = ksp;
                summary["ks_momentum_critical_1pct"] =
                    slg_ks_critical(0.01, static_cast<long long>(ps.size()));
            }

            // histogram plot data
            double z_q, z_p, u_cap, tail;
            int grid_len;
            slg_gibbs_get(ref.get(), &z_q, &z_p, &u_cap, &tail, &grid_len);
            std::vector<double> grid(static_cast<std::size_t>(grid_len)), density(grid.size()),
                cdf(grid.size());
            slg_gibbs_grid(ref.get(), grid.data(), density.data(), cdf.data());
            const double lo = grid.front(), hi = grid.back();
            std::vector<double> emp(static_cast<std::size_t>(bins), 0.0);
            for (double x : qs)
                if (x >= lo && x < hi)
                    emp[static_cast<std::size_t>((x - lo) / (hi - lo) * bins)] += 1.0 / qs.size();
            CsvWriter csv(out.path("hist.csv"), {"bin_center", "empirical", "reference"});
            auto cdf_at = [&](double x) {
                if (x <= lo) return 0.0;
                if (x >= hi) return 1.0;
                const double pos = (x - lo) / (hi - lo) * (grid_len - 1);
                const int j = std::min(static_cast<int>(pos), grid_len - 2);
                const double w = pos - j;
                return cdf[static_cast<std::size_t>(j)] * (1 - w) +
                       cdf[static_cast<std::size_t>(j) + 1] * w;
            };
            for (int k = 0; k < bins; ++k) {
                const double a = lo + (hi - lo) * k / bins;
                const double b2 = lo + (hi - lo) * (k + 1) / bins;
                csv.row({0.5 * (a + b2), emp[static_cast<std::size_t>(k)], cdf_at(b2) - cdf_at(a)});
            }
            csv.close();
        }
    }

    // Lyapunov-based checks need the drift constants
    LyapPtr lyap;
    double c_hat = cfg.get_double("diagnostics", "c", 0.0);
    double log_k = cfg.get_double("diagnostics", "log_k", 0.0);
    if (cfg.has("lyapunov", "b")) {
        lyap = select_lyapunov(cfg, model.get(), sde);
        if (c_hat <= 0.0) {
            std::unique_ptr<slg_drift_report, DriftDeleter> rep(slg_verify_drift(
                lyap.get(), model.get(), cfg.get_int("lyapunov", "samples", 100000), sde.seed + 2));
            if (!rep) fail_from_capi("verify_drift");
            long long samples, violations;
            double worst;
            int pass;
            slg_drift_report_get(rep.get(), &c_hat, &log_k, &samples, &violations, &worst, &pass);
        }
    }

    if (lyap && trajs.size() >= 2 && trajs[0].column("logW") >= 0) {
        const int lwcol = trajs[0].column("logW");
        const int hcol = trajs[0].column("H");
        const long long len = trajs[0].rows;
        std::vector<double> lw, h;
        for (const auto& t : trajs)
            for (long long r = 0; r < len; ++r) {
                lw.push_back(t.at(r, lwcol));
                h.push_back(t.at(r, hcol));
            }
        int pass_w, pass_h;
        slg_moment_bound_check(trajs[0].times.data(), len, lw.data(), h.data(),
                               static_cast<int>(trajs.size()), trajs[0].at(0, lwcol),
                               trajs[0].at(0, hcol), c_hat, log_k, sde.gamma, sde.temperature,
                               n_particles, space_dim, &pass_w, &pass_h);
        summary["moment_bound_pass"] = pass_w != 0 && pass_h != 0;
        summary["moment_bound_w_pass"] = pass_w != 0;
        summary["moment_bound_h_pass"] = pass_h != 0;
        failed_check = failed_check || !(pass_w && pass_h);
    }

    if (lyap && dim == 1) {
        double b, kappa, C, r1, r2;
        slg_lyapunov_get(lyap.get(), &b, &kappa, &C, &r1, &r2);
        double overlap;
        int reliable, pass;
        if (slg_minorization_overlap(
                model.get(), &sde, lyap.get(),
                cfg.get_double("diagnostics", "log_r", b * 20.0),
                cfg.get_double("diagnostics", "t0", 1.0),
                static_cast<int>(cfg.get_int("diagnostics", "starts", 4)),
                static_cast<int>(cfg.get_int("diagnostics", "replicas_per_start", 2000)),
                static_cast<int>(cfg.get_int("diagnostics", "overlap_bins", 16)), sde.seed + 4,
                cfg.get_double("diagnostics", "overlap_floor", 0.01), &overlap, &reliable,
                &pass) != SLG_OK)
            fail_from_capi("minorization_overlap");
        summary["overlap"] = overlap;
        summary["overlap_reliable"] = reliable != 0;
        failed_check = failed_check || (reliable && !pass);
    }

    // test-function gaps over a time grid (1D models)
    if (dim == 1 && ref) {
        const auto t_grid =
            cfg.get_array("diagnostics", "t_grid", {0.2, 0.5, 1.0, 2.0, 4.0});
        const int reps = static_cast<int>(cfg.get_int("diagnostics", "gap_replicas", 128));
        std::vector<double> q0, p0;
        initial_state(cfg, "sde", "x0", model.get(), q0, p0);
        CsvWriter csv(out.path("gaps.csv"), {"phi_index", "t", "gap", "std_error"});
        const auto phis = cfg.get_string_array("diagnostics", "phi", {"tanh_q"});
        for (std::size_t pi = 0; pi < phis.size(); ++pi) {
            std::vector<double> gaps(t_grid.size()), ses(t_grid.size());
            double eta, r2;
            if (slg_test_function_gap(model.get(), &sde, ref.get(), lyap.get(), q0.data(),
                                      p0.data(), 1, t_grid.data(),
                                      static_cast<int>(t_grid.size()), reps, phis[pi].c_str(),
                                      gaps.data(), ses.data(), &eta, &r2) != SLG_OK)
                fail_from_capi("test_function_gap");
            for (std::size_t k = 0; k < t_grid.size(); ++k)
                csv.row({static_cast<double>(pi), t_grid[k], gaps[k], ses[k]});
            summary["gap_eta_" + phis[pi]] = eta;
        }
        csv.close();
    }

    out.write_json("summary.json", summary);
    if (failed_check)
        throw VerificationFailure("diagnose: a moment-bound or overlap check failed");
    return 0;
}

}  // namespace

void run_pipeline(const std::string& command, RunConfig& cfg, const std::string& out_override,
                  int threads) {
    slg_set_max_threads(threads);
    if (!cfg.has("potential", "family"))
        throw UsageError("missing required config key potential.family");
    validate_schema(cfg, cfg.get_string("potential", "family", ""));

    const std::string fmt = cfg.get_string("output", "format", "json");
    if (fmt != "json" && fmt != "csv") throw UsageError("output.format must be json or csv");
    const std::string cfg_dir = cfg.get_string("output", "dir", "slg_out");
    OutputDir out(std::filesystem::path(out_override.empty() ? cfg_dir : out_override));

    std::string science_error;
    try {
        if (command == "simulate")
            pipeline_simulate(cfg, out);
        else if (command == "verify-drift")
            pipeline_verify_drift(cfg, out);
        else if (command == "check-admissible")
            pipeline_check_admissible(cfg, out);
        else if (command == "control-path")
            pipeline_control_path(cfg, out);
        else if (command == "gibbs-ref")
            pipeline_gibbs_ref(cfg, out);
        else if (command == "diagnose")
            pipeline_diagnose(cfg, out);
        else
            throw UsageError("unknown subcommand '" + command + "'");
    } catch (const VerificationFailure& e) {
        science_error = e.what();
    }

    out.write_text("resolved_config.cfg", cfg.resolved_echo());
    out.write_manifest();
    if (!science_error.empty()) throw VerificationFailure(science_error);
}

}  // namespace slgcli
