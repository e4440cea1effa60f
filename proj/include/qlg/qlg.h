/* C interface to the lattice gas library.
 *
 * Every function returns a qlg_status. On failure the message is available
 * from qlg_last_error() on the calling thread until the next failing call.
 * Objects are opaque handles released with their *_destroy function;
 * destroying NULL is a no-op. Output buffers are caller-owned and sized with
 * the accompanying *_size / count query unless stated otherwise.
 */
#ifndef QLG_QLG_H
#define QLG_QLG_H

#include <stddef.h>

#if defined(_WIN32)
#define QLG_API __declspec(dllexport)
#else
#define QLG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qlg_status {
    QLG_OK = 0,
    QLG_ERR_INVALID_ARGUMENT = 1,
    QLG_ERR_COLLISION_RANGE = 2,
    QLG_ERR_DIVERGED = 3,
    QLG_ERR_IO = 4,
    QLG_ERR_NO_ESTIMATE = 5,
    QLG_ERR_NUMERICAL = 6,
    QLG_ERR_BUFFER_TOO_SMALL = 7,
    QLG_ERR_INTERNAL = 8
} qlg_status;

typedef enum qlg_streaming { QLG_STREAM_ALONG = 0, QLG_STREAM_AGAINST = 1 } qlg_streaming;
typedef enum qlg_collision_path { QLG_PATH_CLOSED_FORM = 0, QLG_PATH_QUANTUM = 1 } qlg_collision_path;
typedef enum qlg_init_mode { QLG_INIT_EQUILIBRIUM = 0, QLG_INIT_SYMMETRIC = 1 } qlg_init_mode;
typedef enum qlg_viscosity_variant { QLG_VISC_AS_PRINTED = 0, QLG_VISC_PDE_CONSISTENT = 1 } qlg_viscosity_variant;
typedef enum qlg_nu_variant { QLG_NU_CORRECTED = 0, QLG_NU_YEPEZ = 1 } qlg_nu_variant;

QLG_API const char* qlg_version(void);
QLG_API const char* qlg_last_error(void);
QLG_API const char* qlg_status_name(qlg_status status);

typedef struct qlg_collision_params {
    double theta; /* (0, pi/2] */
    double zeta;
    double xi;
} qlg_collision_params;

typedef struct qlg_step_options {
    qlg_streaming streaming;
    qlg_collision_path path;
} qlg_step_options;

/* ---- single-cell kernels ---- */

QLG_API qlg_status qlg_alpha(const qlg_collision_params* params, double* alpha);
QLG_API qlg_status qlg_equilibrium(double rho, const qlg_collision_params* params, double* f0, double* f1);
QLG_API qlg_status qlg_collide(double f0, double f1, const qlg_collision_params* params, qlg_collision_path path,
                               double* out_f0, double* out_f1);
QLG_API qlg_status qlg_jacobian_gap(double rho, const qlg_collision_params* params, double* gap);

typedef struct qlg_pde_coeffs_1d {
    double c_s;
    double nu;
    double nu_yepez;
} qlg_pde_coeffs_1d;

QLG_API qlg_status qlg_predicted_coefficients_1d(const qlg_collision_params* params, double dx, double dt,
                                                 qlg_pde_coeffs_1d* out);

/* d_t rho + a.grad rho + b.[(1 - rho) grad rho] = div(D grad rho) */
typedef struct qlg_pde_coeffs_2d {
    double a[2];
    double b[2];
    double D[2][2];
} qlg_pde_coeffs_2d;

/* velocity_set: "axis_symmetric", "diagonal_symmetric", "orthogonal" or
 * "triangular". index_space != 0 gives the coefficients seen on the integer
 * index grid instead of Cartesian coordinates. */
QLG_API qlg_status qlg_predicted_coefficients_2d(const char* velocity_set, const qlg_collision_params* params,
                                                 double ds, double dt, int index_space, qlg_pde_coeffs_2d* out);

/* ---- lattice ---- */

typedef struct qlg_lattice qlg_lattice;

/* rho = rho_b + rho_a cos(2 pi x / lx), dx = lx / nx, dt = dx^2. */
QLG_API qlg_status qlg_lattice_create_1d(int nx, double lx, double rho_b, double rho_a,
                                         const qlg_collision_params* params, qlg_init_mode init, qlg_lattice** out);
/* rho = rho_b + rho_a [cos(2 pi i / nx) + cos(2 pi j / ny)], dt = ds^2. */
QLG_API qlg_status qlg_lattice_create_2d(int nx, int ny, double ds, double rho_b, double rho_a,
                                         const qlg_collision_params* params, const char* velocity_set,
                                         qlg_init_mode init, qlg_lattice** out);
QLG_API void qlg_lattice_destroy(qlg_lattice* lattice);

QLG_API qlg_status qlg_lattice_set_options(qlg_lattice* lattice, const qlg_step_options* options);
QLG_API qlg_status qlg_lattice_step(qlg_lattice* lattice, long n_steps);

typedef struct qlg_grid_info {
    int nx;
    int ny;
    double dx;
    double dt;
    long step;
} qlg_grid_info;

QLG_API qlg_status qlg_lattice_info(const qlg_lattice* lattice, qlg_grid_info* info);
/* n must equal nx * ny. */
QLG_API qlg_status qlg_lattice_density(const qlg_lattice* lattice, double* rho, size_t n);
QLG_API qlg_status qlg_lattice_populations(const qlg_lattice* lattice, double* f0, double* f1, size_t n);
QLG_API qlg_status qlg_lattice_total_mass(const qlg_lattice* lattice, double* mass);
/* Columns t,x[,y],rho,u,f0,f1. */
QLG_API qlg_status qlg_lattice_write_snapshot(const qlg_lattice* lattice, const char* path);

/* ---- finite differences ---- */

typedef struct qlg_fdm qlg_fdm;

/* substeps <= 0 picks the count automatically. */
QLG_API qlg_status qlg_fdm_create_1d(int nx, double ds, double dt, double c_s, double nu, const double* rho0,
                                     size_t n, double rho_b, double rho_a, int substeps, qlg_fdm** out);
QLG_API qlg_status qlg_fdm_create_2d(int nx, int ny, double ds, double dt, const qlg_pde_coeffs_2d* coeffs,
                                     const double* rho0, size_t n, double rho_b, double rho_a, int substeps,
                                     qlg_fdm** out);
QLG_API void qlg_fdm_destroy(qlg_fdm* fdm);

/* Advances up to n_steps outer steps. Returns QLG_ERR_DIVERGED as soon as the
 * field diverges, and on any later call. */
QLG_API qlg_status qlg_fdm_step(qlg_fdm* fdm, long n_steps);
QLG_API qlg_status qlg_fdm_info(const qlg_fdm* fdm, qlg_grid_info* info, int* substeps);
/* *has_diverged = 0 or 1; *step is set only when it is 1. */
QLG_API qlg_status qlg_fdm_diverged_at(const qlg_fdm* fdm, int* has_diverged, long* step);
QLG_API qlg_status qlg_fdm_density(const qlg_fdm* fdm, double* rho, size_t n);

/* ---- Cole-Hopf solution ---- */

typedef struct qlg_analytic_config {
    double lx;
    double rho_a;
    double rho_b;
    double c;
    double alpha;
    double nu;
    int l_trunc;
} qlg_analytic_config;

QLG_API qlg_status qlg_analytic_density(const qlg_analytic_config* cfg, const double* xs, size_t n, double t,
                                        double* rho);
QLG_API qlg_status qlg_bessel_ratio(int l, double a, double* ratio);

/* ---- density traces and estimators ---- */

typedef struct qlg_trace qlg_trace;

QLG_API qlg_status qlg_trace_create(int nx, int ny, double dx, double dt, qlg_trace** out);
QLG_API void qlg_trace_destroy(qlg_trace* trace);
/* Snapshots need a uniform step stride. */
QLG_API qlg_status qlg_trace_append(qlg_trace* trace, long step, const double* rho, size_t n);
QLG_API qlg_status qlg_trace_size(const qlg_trace* trace, size_t* size);

typedef struct qlg_viscosity_estimate {
    double nu;       /* valid when has_nu */
    int has_nu;
    double kept_fraction;
    int skipped_steps;
} qlg_viscosity_estimate;

QLG_API qlg_status qlg_trace_viscosity(const qlg_trace* trace, const qlg_collision_params* params,
                                       qlg_viscosity_variant variant, qlg_viscosity_estimate* out);
QLG_API qlg_status qlg_trace_steepness(const qlg_trace* trace, double* delta);
QLG_API qlg_status qlg_trace_shock_formation(const qlg_trace* trace, size_t* index, long* step);

QLG_API qlg_status qlg_analytic_config_for(const qlg_trace* trace, double rho_b, double rho_a,
                                           const qlg_collision_params* params, qlg_nu_variant variant, int l_trunc,
                                           qlg_analytic_config* out);

typedef struct qlg_metric {
    double t;
    double value; /* valid when defined */
    int defined;
} qlg_metric;

/* One metric per snapshot; `capacity` must be at least the trace size.
 * *count receives the number written. */
QLG_API qlg_status qlg_trace_mse(const qlg_trace* trace, const qlg_analytic_config* cfg, qlg_metric* out,
                                 size_t capacity, size_t* count);
/* Stops before fdm_diverged_at when has_diverged is nonzero. */
QLG_API qlg_status qlg_trace_l2_compare(const qlg_trace* qlg, const qlg_trace* fdm, double rho_b,
                                        int has_diverged, long fdm_diverged_at, qlg_metric* out, size_t capacity,
                                        size_t* count);

typedef struct qlg_calibration_case {
    double theta;
    qlg_viscosity_variant variant;
    double nu_true;
    double nu_est;
    int has_estimate;
    double rel_error;
    double kept_fraction;
} qlg_calibration_case;

/* cases needs room for 2 * n_thetas entries. *selected is -1 when neither
 * variant qualifies. */
QLG_API qlg_status qlg_calibrate_viscosity_estimator(const double* thetas, size_t n_thetas, int nx, double rho_b,
                                                     double rho_a, int steps, qlg_calibration_case* cases,
                                                     int* selected);

/* ---- sweeps ---- */

#define QLG_ERROR_TEXT 256

typedef struct qlg_viscosity_sweep_config {
    const double* thetas;
    size_t n_thetas;
    int nx;
    double lx;
    double rho_b;
    double rho_a;
    double zeta;
    double xi;
    int steps;
    qlg_viscosity_variant variant;
    qlg_step_options options;
    qlg_init_mode init;
} qlg_viscosity_sweep_config;

/* Defaults: nx 64, lx 64, rho_b 1, rho_a 0.005, steps 200, PDE-consistent. */
QLG_API void qlg_viscosity_sweep_defaults(qlg_viscosity_sweep_config* cfg);

typedef struct qlg_sweep_row {
    double theta;
    double nu_pred;
    double nu_yepez;
    double nu_exp; /* valid when has_nu_exp */
    int has_nu_exp;
    double kept_fraction;
    int steps;
    char error[QLG_ERROR_TEXT]; /* empty on success */
} qlg_sweep_row;

/* rows needs n_thetas entries. Per-theta failures land in the row. */
QLG_API qlg_status qlg_viscosity_sweep(const qlg_viscosity_sweep_config* cfg, int threads, qlg_sweep_row* rows);

typedef struct qlg_steepness_sweep_config {
    const double* thetas;
    size_t n_thetas;
    const int* nxs;
    size_t n_nxs;
    const int* horizons;
    size_t n_horizons;
    double lx; /* <= 0: lattice units, lx = nx */
    double rho_b;
    double rho_a;
    double zeta;
    double xi;
    qlg_step_options options;
    qlg_init_mode init;
} qlg_steepness_sweep_config;

typedef struct qlg_steepness_row {
    double theta;
    int nx;
    int steps;
    double delta;
    char error[QLG_ERROR_TEXT];
} qlg_steepness_row;

/* rows needs n_nxs * n_thetas * n_horizons entries, ordered by nx, theta,
 * horizon as given. */
QLG_API qlg_status qlg_steepness_sweep(const qlg_steepness_sweep_config* cfg, int threads, qlg_steepness_row* rows);

/* ---- CSV ---- */

QLG_API qlg_status qlg_write_density_snapshot(const char* path, double t, int nx, int ny, double dx,
                                              const double* rho, size_t n);
QLG_API qlg_status qlg_write_metric_csv(const char* path, const qlg_metric* rows, size_t n);
QLG_API qlg_status qlg_write_sweep_csv(const char* path, const qlg_sweep_row* rows, size_t n);
QLG_API qlg_status qlg_write_steepness_csv(const char* path, const qlg_steepness_row* rows, size_t n);

typedef struct qlg_density_snapshot {
    double t;
    int nx;
    int ny;
    double dx;
    double* rho; /* nx * ny values, owned by the library */
} qlg_density_snapshot;

/* Release with qlg_density_snapshot_free. */
QLG_API qlg_status qlg_read_density_snapshot(const char* path, qlg_density_snapshot* out);
QLG_API void qlg_density_snapshot_free(qlg_density_snapshot* snapshot);

/* "{run_id}_t{step}.csv" into buf (including the terminating NUL). */
QLG_API qlg_status qlg_snapshot_filename(const char* run_id, long step, char* buf, size_t buf_size);

#ifdef __cplusplus
}
#endif

#endif
