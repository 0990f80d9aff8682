/* C interface to the de Sitter Klein-Gordon verification toolkit.
 *
 * Scalar entry points evaluate the special functions and kernel identities
 * directly. Everything else runs through JSON-configured jobs: pass a config
 * document to dskg_job_run, read the result JSON and any CSV artifacts from
 * the returned handle, and free it with dskg_job_free.
 *
 * All functions returning dskg_status set a thread-local message readable
 * via dskg_last_error on failure. Strings returned from a job handle stay
 * valid until dskg_job_free is called on that handle.
 */
#ifndef DSKG_H
#define DSKG_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dskg_status {
    DSKG_OK = 0,
    DSKG_ERR_CONFIG = 1,   /* malformed configuration or argument */
    DSKG_ERR_DOMAIN = 2,   /* input outside the documented domain */
    DSKG_ERR_NUMERIC = 3,  /* accuracy target not reached */
    DSKG_ERR_INTERNAL = 4  /* unexpected failure */
} dskg_status;

const char* dskg_version(void);

/* Thread-local message describing the most recent failure in this thread. */
const char* dskg_last_error(void);

/* Gauss hypergeometric function F(a, b; c; zeta), zeta in [0, 1). */
dskg_status dskg_gauss_2f1(double a, double b, double c, double zeta,
                           double* out);

/* Backward light-cone kernel density at emission time b, observation time t,
 * spatial radius r, curved mass M. */
dskg_status dskg_kernel_eval(double M, double b, double t, double r,
                             double* out);

/* Integral of the kernel over its spatial section, with error estimate,
 * and its closed form sinh(M (t - b)) / M. */
dskg_status dskg_kernel_moment(double M, double b, double t, double tol,
                               double* out_value, double* out_error);
dskg_status dskg_kernel_moment_closed_form(double M, double b, double t,
                                           double* out);

/* Residual of the integral-representation identity selected by case_tag
 * ("i", "ii", "iii", "corollary_i", "corollary_ii", "corollary_iii") in
 * dimension n. Corollary cases require M = 0. */
dskg_status dskg_identity_check(const char* case_tag, int n, double M,
                                double b, double t, double tol,
                                double* out_residual);

/* JSON-configured jobs. Config documents carry {"schema_version": 1,
 * "kind": "identity" | "kernel" | "ode" | "certify" | "pde" | "scan" |
 * "plotdata", ...}. */
typedef struct dskg_job dskg_job;

dskg_status dskg_job_run(const char* config_json, dskg_job** out_job);

/* Result document for the completed job. */
const char* dskg_job_result_json(const dskg_job* job);

/* 1 when every check the job performed passed, else 0. */
int dskg_job_checks_passed(const dskg_job* job);

/* CSV artifacts attached to the job. */
int dskg_job_csv_count(const dskg_job* job);
const char* dskg_job_csv_name(const dskg_job* job, int index);
const char* dskg_job_csv_data(const dskg_job* job, int index);

void dskg_job_free(dskg_job* job);

#ifdef __cplusplus
}
#endif

#endif /* DSKG_H */
