/* Sod shock tube through the C interface.
 * Build: cargo build --release -p gravwell-ffi
 *        cc examples/sod.c -Iinclude ../../target/release/libgravwell_ffi.a -lm -lpthread -ldl -o sod */
#include <stdio.h>
#include "gravwell.h"

#define N 100

int main(void) {
    double rho[N], q[N], e[N];
    for (int i = 0; i < N; i++) {
        rho[i] = i < N / 2 ? 1.0 : 0.125;
        q[i] = 0.0;
        e[i] = i < N / 2 ? 2.5 : 0.25;
    }
    GwSim1dParams p = {0.0, 1.0, GW_POTENTIAL_ZERO, GW_BOUNDARY_NEUMANN, GW_SCHEME_WB2, 1.4, 0.9, 1.0, 1.0};
    GwSim1d *sim = NULL;
    if (gw_sim1d_create(&p, N, rho, q, e, &sim) != GW_STATUS_OK || gw_sim1d_advance(sim, 0.2) != GW_STATUS_OK) {
        fprintf(stderr, "error: %s\n", gw_last_error_message());
        gw_sim1d_destroy(sim);
        return 1;
    }
    gw_sim1d_state(sim, N, rho, q, e);
    printf("gravwell %s, t = %g, rho[N/2] = %.6f\n", gw_version(), gw_sim1d_time(sim), rho[N / 2]);
    gw_sim1d_destroy(sim);
    return 0;
}
