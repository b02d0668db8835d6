#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <slangevin.h>

TEST_CASE("model handles evaluate and report errors through codes") {
    slg_model* m = slg_model_singular_pair_1d(1.0, 2.0, 1.0, 1.0);
    REQUIRE(m != nullptr);
    CHECK(slg_model_dim(m) == 1);

    const double q1 = 1.0;
    CHECK(slg_potential(m, &q1, 1) == doctest::Approx(2.0));
    const double q_neg = -0.5;
    CHECK(slg_potential(m, &q_neg, 1) == std::numeric_limits<double>::infinity());

    double g;
    CHECK(slg_gradient(m, &q1, 1, &g) == SLG_OK);
    CHECK(g == doctest::Approx(1.0));
    CHECK(slg_gradient(m, &q_neg, 1, &g) == SLG_ERR_DOMAIN);
    CHECK(std::strlen(slg_last_error()) > 0);

    double h;
    CHECK(slg_hessian(m, &q1, 1, &h) == SLG_OK);
    CHECK(h == doctest::Approx(4.0));

    CHECK(slg_in_domain(m, &q1, 1) == 1);
    CHECK(slg_in_domain(m, &q_neg, 1) == 0);

    // dimension mismatch surfaces as invalid-argument, not a crash
    const double q2[2] = {1.0, 2.0};
    CHECK(slg_gradient(m, q2, 2, &g) == SLG_ERR_INVALID);

    slg_model_free(m);

    // bad construction yields a null handle and a message
    CHECK(slg_model_singular_pair_1d(-1.0, 2.0, 1.0, 1.0) == nullptr);
    CHECK(std::strlen(slg_last_error()) > 0);
}

TEST_CASE("simulation through the c api is deterministic") {
    slg_model* m = slg_model_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    slg_sde sde;
    slg_sde_defaults(&sde);
    sde.temperature = 0.5;
    sde.n_steps = 2000;
    sde.sample_every = 100;
    sde.seed = 9;
    const double q0 = 1.0, p0 = 0.0;

    slg_traj* a = slg_simulate(m, &sde, &q0, &p0, 1, nullptr, 0, 1);
    slg_traj* b = slg_simulate(m, &sde, &q0, &p0, 1, nullptr, 0, 1);
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    const long long rows = slg_traj_rows(a);
    const int cols = slg_traj_cols(a);
    CHECK(rows == 21);
    CHECK(std::string(slg_traj_column_name(a, 0)) == "H");
    CHECK(std::string(slg_traj_column_name(a, cols - 1)) == "p1");

    std::vector<double> ta(rows), ra(rows * cols), tb(rows), rb(rows * cols);
    CHECK(slg_traj_copy(a, ta.data(), ra.data()) == SLG_OK);
    CHECK(slg_traj_copy(b, tb.data(), rb.data()) == SLG_OK);
    CHECK(std::memcmp(ra.data(), rb.data(), sizeof(double) * ra.size()) == 0);
    CHECK(slg_traj_exit_flag(a) == 0);
    slg_traj_free(a);
    slg_traj_free(b);
    slg_model_free(m);
}

TEST_CASE("lyapunov selection and drift verification via the c api") {
    slg_model* m = slg_model_singular_pair_1d(1.0, 4.0, 1.0, 2.0);
    slg_lyapunov* l = slg_select_params(m, 1.0, 0.5, 1.0, 1e-3, 1.0, 20000, 2024);
    REQUIRE(l != nullptr);
    double b, kappa, C, r1, r2;
    CHECK(slg_lyapunov_get(l, &b, &kappa, &C, &r1, &r2) == SLG_OK);
    CHECK(kappa > 3.0);
    CHECK(r2 > r1);

    const double q = 1.0, p = 1.0;
    CHECK(slg_hamiltonian(m, &q, &p, 1) == doctest::Approx(2.5));
    CHECK(slg_psi(l, m, &q, &p, 1) == 0.0);  // U(1) = 2 is far below r1
    CHECK(slg_log_w(l, m, &q, &p, 1) == doctest::Approx(2.5));
    CHECK(std::isfinite(slg_generator_ratio(l, m, &q, &p, 1)));

    // b outside (0, 1/T) is an invalid-argument failure
    CHECK(slg_select_params(m, 1.0, 0.5, 2.5, 1e-3, 1.0, 1000, 1) == nullptr);

    slg_drift_report* rep = slg_verify_drift(l, m, 20000, 7);
    REQUIRE(rep != nullptr);
    double c_hat, log_k, worst;
    long long samples, violations;
    int pass;
    CHECK(slg_drift_report_get(rep, &c_hat, &log_k, &samples, &violations, &worst, &pass) ==
          SLG_OK);
    CHECK(pass == 1);
    CHECK(violations == 0);
    CHECK(c_hat > 0.0);
    slg_drift_report_free(rep);
    slg_lyapunov_free(l);
    slg_model_free(m);
}

TEST_CASE("gibbs reference and histogram distance via the c api") {
    slg_model* m = slg_model_poly_confine(0.5, 2.0, 1, 1);
    slg_gibbs* ref = slg_gibbs_reference(m, 1.0, 0.0, 2048);
    REQUIRE(ref != nullptr);
    double z_q, z_p, u_cap, tail;
    int grid_len;
    CHECK(slg_gibbs_get(ref, &z_q, &z_p, &u_cap, &tail, &grid_len) == SLG_OK);
    CHECK(z_q == doctest::Approx(std::sqrt(2.0 * 3.14159265358979324)).epsilon(1e-8));
    CHECK(grid_len == 2048);

    std::vector<double> samples(20000);
    CHECK(slg_gibbs_sample_positions(ref, 20000, 5, samples.data()) == SLG_OK);
    double tv, ks;
    CHECK(slg_histogram_distance(samples.data(), 20000, ref, 80, &tv, &ks) == SLG_OK);
    CHECK(tv < 0.1);
    CHECK(ks < slg_ks_critical(0.01, 20000));
    slg_gibbs_free(ref);
    slg_model_free(m);
}

TEST_CASE("reachability via the c api") {
    slg_model* m = slg_model_singular_pair_1d(1.0, 2.0, 1.0, 1.0);
    const double q0 = 1.0, p0 = 0.0, q1 = 2.0, p1 = 0.5;
    double err, tol, max_u, cost;
    int pass;
    CHECK(slg_verify_reachability(m, &q0, &p0, &q1, &p1, 1, 2.0, 1.0, 0.5, nullptr, 0, &err,
                                  &tol, &max_u, &cost, &pass) == SLG_OK);
    CHECK(pass == 1);
    CHECK(err <= tol);
    slg_model_free(m);
}

TEST_CASE("admissibility probes via the c api") {
    slg_model* m = slg_model_interacting(1.0, 2.0, 1.0, 12.0, 1.0, 2, 2);
    slg_admissibility* a = slg_probe_admissibility(m, 0.5, 11);
    REQUIRE(a != nullptr);
    CHECK(slg_admissibility_pass(a) == 1);
    CHECK(slg_admissibility_sequences(a) == 4);
    char label[32];
    int valid, pass, n_points;
    CHECK(slg_admissibility_sequence(a, 0, label, sizeof label, &valid, &pass, &n_points) ==
          SLG_OK);
    CHECK(valid == 1);
    CHECK(n_points >= 8);
    slg_admissibility_free(a);

    double c1, c2, D, worst;
    int bpass;
    CHECK(slg_gradient_lower_bound(m, 5000, 3, &c1, &c2, &D, &worst, &bpass) == SLG_OK);
    CHECK(bpass == 1);
    slg_model_free(m);
}
