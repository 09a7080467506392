/* Elastic net from C: build a problem, solve with CGS, print the result. */
#include <stdio.h>
#include <stdlib.h>

#include "gcgs.h"

#define ROWS 30
#define COLS 4

static int check(GcgsStatus st, const char *what) {
    if (st != GCGS_STATUS_OK) {
        const char *msg = gcgs_last_error_message();
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)st, msg ? msg : "");
        return 1;
    }
    return 0;
}

int main(void) {
    double z[ROWS * COLS], y[ROWS];
    for (int i = 0; i < ROWS; i++) {
        for (int j = 0; j < COLS; j++)
            z[i * COLS + j] = (double)((i * 7 + j * 13) % 11) / 11.0 - 0.5;
        y[i] = z[i * COLS] - 0.5 * z[i * COLS + 1] > 0 ? 1.0 : -1.0;
    }

    GcgsEnetProblem *problem = NULL;
    if (check(gcgs_enet_problem_new(z, ROWS, COLS, y, GCGS_LOSS_LOGISTIC, 0.1, 2.0, &problem), "problem"))
        return 1;

    GcgsSolverOptions opts = gcgs_solver_options_default();
    opts.gap_tol = 0.0;
    opts.residual_tol = 1e-8;
    opts.max_iter = 10000;

    GcgsResult *result = NULL;
    if (check(gcgs_enet_solve(problem, NULL, &opts, &result), "solve"))
        return 1;

    double x[COLS];
    GcgsTermination term;
    GcgsIteration last;
    size_t len = gcgs_result_trace_len(result);
    if (check(gcgs_result_x(result, x, COLS), "x") || check(gcgs_result_termination(result, &term), "termination") ||
        check(gcgs_result_trace_row(result, len - 1, &last), "trace"))
        return 1;

    printf("gcgs %s: termination %d after %zu iterations\n", gcgs_version(), (int)term, last.iter);
    printf("objective %.12g residual %.3g\n", last.objective, last.residual);
    for (int j = 0; j < COLS; j++)
        printf("x[%d] = % .6f\n", j, x[j]);

    gcgs_result_free(result);
    gcgs_enet_problem_free(problem);
    return term == GCGS_TERMINATION_RESIDUAL_TOL ? 0 : 2;
}
