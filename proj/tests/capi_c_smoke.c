/* Compiled as C99: proves the public header is C-clean and the shared
 * library links from plain C. */

#include <math.h>
#include <stdio.h>

#include <slangevin.h>

int main(void) {
    slg_model* m = slg_model_singular_pair_1d(1.0, 2.0, 1.0, 1.0);
    if (!m) {
        fprintf(stderr, "model: %s\n", slg_last_error());
        return 1;
    }
    const double q = 1.0;
    const double u = slg_potential(m, &q, 1);
    if (fabs(u - 2.0) > 1e-12) return 2;

    double g = 0.0;
    if (slg_gradient(m, &q, 1, &g) != SLG_OK) return 3;
    if (fabs(g - 1.0) > 1e-12) return 4;

    const double q_bad = -1.0;
    if (slg_gradient(m, &q_bad, 1, &g) != SLG_ERR_DOMAIN) return 5;

    slg_sde sde;
    slg_sde_defaults(&sde);
    sde.n_steps = 100;
    const double p0 = 0.0;
    slg_traj* t = slg_simulate(m, &sde, &q, &p0, 1, NULL, 0, 0);
    if (!t) return 6;
    if (slg_traj_rows(t) != 101) return 7;
    slg_traj_free(t);
    slg_model_free(m);
    return 0;
}
