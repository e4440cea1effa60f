#include "qlg/qlg.h"

#include "qlg/analytic.hpp"
#include "qlg/error.hpp"
#include "qlg/experiments.hpp"
#include "qlg/fdm.hpp"
#include "qlg/lattice.hpp"
#include "qlg/snapshot_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#ifndef QLG_VERSION_STRING
#define QLG_VERSION_STRING "0.0.0"
#endif

struct qlg_lattice {
    qlg::PopulationField field;
    qlg::CollisionParams params;
    std::optional<qlg::VelocitySet2D> vset;
    qlg::StepOptions options;
};

struct qlg_fdm {
    qlg::FdmState2D state;
};

struct qlg_trace {
    qlg::DensityTrace trace;
};

namespace {

thread_local std::string last_error;

qlg_status to_status(qlg::ErrorCode code)
{
    switch (code) {
    case qlg::ErrorCode::InvalidArgument:
        return QLG_ERR_INVALID_ARGUMENT;
    case qlg::ErrorCode::CollisionRange:
        return QLG_ERR_COLLISION_RANGE;
    case qlg::ErrorCode::Diverged:
        return QLG_ERR_DIVERGED;
    case qlg::ErrorCode::Io:
        return QLG_ERR_IO;
    case qlg::ErrorCode::NoEstimate:
        return QLG_ERR_NO_ESTIMATE;
    case qlg::ErrorCode::Numerical:
        return QLG_ERR_NUMERICAL;
    }
    return QLG_ERR_INTERNAL;
}

qlg_status set_error(qlg_status s, std::string msg)
{
    last_error = std::move(msg);
    return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
qlg_status guard(F&& f) noexcept
{
    try {
        return f();
    } catch (const qlg::Error& e) {
        return set_error(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(QLG_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(QLG_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(QLG_ERR_INTERNAL, "unknown error");
    }
}

void need(const void* p, const char* name)
{
    if (!p)
        qlg::fail(qlg::ErrorCode::InvalidArgument, std::string(name) + " must not be NULL");
}

void need_size(size_t n, size_t want, const char* what)
{
    if (n != want)
        qlg::fail(qlg::ErrorCode::InvalidArgument,
                  std::string(what) + ": expected " + std::to_string(want) + " values, got " + std::to_string(n));
}

qlg::CollisionParams params_of(const qlg_collision_params* p)
{
    need(p, "params");
    return qlg::CollisionParams(p->theta, p->zeta, p->xi);
}

qlg::Streaming streaming_of(qlg_streaming s)
{
    switch (s) {
    case QLG_STREAM_ALONG:
        return qlg::Streaming::AlongVelocity;
    case QLG_STREAM_AGAINST:
        return qlg::Streaming::AgainstVelocity;
    }
    qlg::fail(qlg::ErrorCode::InvalidArgument, "unknown streaming mode");
}

qlg::CollisionPath path_of(qlg_collision_path p)
{
    switch (p) {
    case QLG_PATH_CLOSED_FORM:
        return qlg::CollisionPath::ClosedForm;
    case QLG_PATH_QUANTUM:
        return qlg::CollisionPath::Quantum;
    }
    qlg::fail(qlg::ErrorCode::InvalidArgument, "unknown collision path");
}

qlg::StepOptions options_of(const qlg_step_options& o) { return {streaming_of(o.streaming), path_of(o.path)}; }

qlg::InitMode init_of(qlg_init_mode m)
{
    switch (m) {
    case QLG_INIT_EQUILIBRIUM:
        return qlg::InitMode::Equilibrium;
    case QLG_INIT_SYMMETRIC:
        return qlg::InitMode::Symmetric;
    }
    qlg::fail(qlg::ErrorCode::InvalidArgument, "unknown init mode");
}

qlg::ViscosityVariant variant_of(qlg_viscosity_variant v)
{
    switch (v) {
    case QLG_VISC_AS_PRINTED:
        return qlg::ViscosityVariant::AsPrinted;
    case QLG_VISC_PDE_CONSISTENT:
        return qlg::ViscosityVariant::PdeConsistent;
    }
    qlg::fail(qlg::ErrorCode::InvalidArgument, "unknown viscosity variant");
}

qlg_viscosity_variant variant_to_c(qlg::ViscosityVariant v)
{
    return v == qlg::ViscosityVariant::AsPrinted ? QLG_VISC_AS_PRINTED : QLG_VISC_PDE_CONSISTENT;
}

qlg::PdeCoefficients2D coeffs_of(const qlg_pde_coeffs_2d* c)
{
    need(c, "coeffs");
    qlg::PdeCoefficients2D k{};
    k.a = {c->a[0], c->a[1]};
    k.b = {c->b[0], c->b[1]};
    k.D = {{{c->D[0][0], c->D[0][1]}, {c->D[1][0], c->D[1][1]}}};
    return k;
}

qlg_pde_coeffs_2d coeffs_to_c(const qlg::PdeCoefficients2D& k)
{
    qlg_pde_coeffs_2d c{};
    c.a[0] = k.a.x;
    c.a[1] = k.a.y;
    c.b[0] = k.b.x;
    c.b[1] = k.b.y;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c.D[i][j] = k.D[i][j];
    return c;
}

qlg::AnalyticConfig analytic_of(const qlg_analytic_config* c)
{
    need(c, "cfg");
    return {c->lx, c->rho_a, c->rho_b, c->c, c->alpha, c->nu, c->l_trunc};
}

void copy_text(char (&dst)[QLG_ERROR_TEXT], const std::string& src)
{
    const size_t n = std::min(src.size(), static_cast<size_t>(QLG_ERROR_TEXT - 1));
    std::memcpy(dst, src.data(), n);
    dst[n] = '\0';
}

qlg_status write_metrics(const std::vector<qlg::TimeMetric>& m, qlg_metric* out, size_t capacity, size_t* count)
{
    need(count, "count");
    *count = m.size();
    if (m.size() > capacity)
        return set_error(QLG_ERR_BUFFER_TOO_SMALL,
                         "metric buffer holds " + std::to_string(capacity) + ", need " + std::to_string(m.size()));
    if (!m.empty())
        need(out, "out");
    for (size_t i = 0; i < m.size(); ++i)
        out[i] = {m[i].t, m[i].value.value_or(0.0), m[i].value ? 1 : 0};
    return QLG_OK;
}

} // namespace

extern "C" {

const char* qlg_version(void) { return QLG_VERSION_STRING; }

const char* qlg_last_error(void) { return last_error.c_str(); }

const char* qlg_status_name(qlg_status status)
{
    switch (status) {
    case QLG_OK:
        return "ok";
    case QLG_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case QLG_ERR_COLLISION_RANGE:
        return "collision range";
    case QLG_ERR_DIVERGED:
        return "diverged";
    case QLG_ERR_IO:
        return "i/o error";
    case QLG_ERR_NO_ESTIMATE:
        return "no estimate";
    case QLG_ERR_NUMERICAL:
        return "numerical error";
    case QLG_ERR_BUFFER_TOO_SMALL:
        return "buffer too small";
    case QLG_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

qlg_status qlg_alpha(const qlg_collision_params* params, double* alpha)
{
    return guard([&] {
        need(alpha, "alpha");
        *alpha = params_of(params).alpha();
        return QLG_OK;
    });
}

qlg_status qlg_equilibrium(double rho, const qlg_collision_params* params, double* f0, double* f1)
{
    return guard([&] {
        need(f0, "f0");
        need(f1, "f1");
        qlg::PopulationPair e = qlg::equilibrium(rho, params_of(params));
        *f0 = e.f0;
        *f1 = e.f1;
        return QLG_OK;
    });
}

qlg_status qlg_collide(double f0, double f1, const qlg_collision_params* params, qlg_collision_path path,
                       double* out_f0, double* out_f1)
{
    return guard([&] {
        need(out_f0, "out_f0");
        need(out_f1, "out_f1");
        qlg::CollisionParams p = params_of(params);
        qlg::PopulationPair r = path_of(path) == qlg::CollisionPath::Quantum ? qlg::collide_quantum({f0, f1}, p)
                                                                             : qlg::collide_closed_form({f0, f1}, p);
        *out_f0 = r.f0;
        *out_f1 = r.f1;
        return QLG_OK;
    });
}

qlg_status qlg_jacobian_gap(double rho, const qlg_collision_params* params, double* gap)
{
    return guard([&] {
        need(gap, "gap");
        *gap = qlg::jacobian_gap(rho, params_of(params));
        return QLG_OK;
    });
}

qlg_status qlg_predicted_coefficients_1d(const qlg_collision_params* params, double dx, double dt,
                                         qlg_pde_coeffs_1d* out)
{
    return guard([&] {
        need(out, "out");
        qlg::PdeCoefficients1D k = qlg::predicted_coefficients_1d(params_of(params), dx, dt);
        *out = {k.c_s, k.nu, k.nu_yepez};
        return QLG_OK;
    });
}

qlg_status qlg_predicted_coefficients_2d(const char* velocity_set, const qlg_collision_params* params, double ds,
                                         double dt, int index_space, qlg_pde_coeffs_2d* out)
{
    return guard([&] {
        need(velocity_set, "velocity_set");
        need(out, "out");
        qlg::VelocitySet2D vs = qlg::VelocitySet2D::by_name(velocity_set);
        if (index_space)
            vs = vs.index_space();
        *out = coeffs_to_c(qlg::predicted_coefficients_2d(vs, params_of(params), ds, dt));
        return QLG_OK;
    });
}

qlg_status qlg_lattice_create_1d(int nx, double lx, double rho_b, double rho_a, const qlg_collision_params* params,
                                 qlg_init_mode init, qlg_lattice** out)
{
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        qlg::CollisionParams p = params_of(params);
        qlg::PopulationField f = qlg::init_cosine_1d({nx, lx}, rho_b, rho_a, p, init_of(init));
        *out = new qlg_lattice{std::move(f), p, std::nullopt, {}};
        return QLG_OK;
    });
}

qlg_status qlg_lattice_create_2d(int nx, int ny, double ds, double rho_b, double rho_a,
                                 const qlg_collision_params* params, const char* velocity_set, qlg_init_mode init,
                                 qlg_lattice** out)
{
    return guard([&] {
        need(out, "out");
        need(velocity_set, "velocity_set");
        *out = nullptr;
        qlg::CollisionParams p = params_of(params);
        qlg::VelocitySet2D vs = qlg::VelocitySet2D::by_name(velocity_set);
        qlg::PopulationField f = qlg::init_cosine_2d({nx, ny, ds}, rho_b, rho_a, p, init_of(init));
        *out = new qlg_lattice{std::move(f), p, std::move(vs), {}};
        return QLG_OK;
    });
}

void qlg_lattice_destroy(qlg_lattice* lattice) { delete lattice; }

qlg_status qlg_lattice_set_options(qlg_lattice* lattice, const qlg_step_options* options)
{
    return guard([&] {
        need(lattice, "lattice");
        need(options, "options");
        lattice->options = options_of(*options);
        return QLG_OK;
    });
}

qlg_status qlg_lattice_step(qlg_lattice* lattice, long n_steps)
{
    return guard([&] {
        need(lattice, "lattice");
        if (n_steps < 0)
            qlg::fail(qlg::ErrorCode::InvalidArgument, "n_steps must be non-negative");
        for (long k = 0; k < n_steps; ++k) {
            if (lattice->vset)
                qlg::step_inplace(lattice->field, lattice->params, *lattice->vset, lattice->options);
            else
                qlg::step_inplace(lattice->field, lattice->params, lattice->options);
        }
        return QLG_OK;
    });
}

qlg_status qlg_lattice_info(const qlg_lattice* lattice, qlg_grid_info* info)
{
    return guard([&] {
        need(lattice, "lattice");
        need(info, "info");
        const auto& f = lattice->field;
        *info = {f.nx, f.ny, f.dx, f.dt, f.step};
        return QLG_OK;
    });
}

qlg_status qlg_lattice_density(const qlg_lattice* lattice, double* rho, size_t n)
{
    return guard([&] {
        need(lattice, "lattice");
        need(rho, "rho");
        need_size(n, lattice->field.size(), "density buffer");
        std::vector<double> r = qlg::density(lattice->field);
        std::copy(r.begin(), r.end(), rho);
        return QLG_OK;
    });
}

qlg_status qlg_lattice_populations(const qlg_lattice* lattice, double* f0, double* f1, size_t n)
{
    return guard([&] {
        need(lattice, "lattice");
        need(f0, "f0");
        need(f1, "f1");
        need_size(n, lattice->field.size(), "population buffer");
        std::copy(lattice->field.f0.begin(), lattice->field.f0.end(), f0);
        std::copy(lattice->field.f1.begin(), lattice->field.f1.end(), f1);
        return QLG_OK;
    });
}

qlg_status qlg_lattice_total_mass(const qlg_lattice* lattice, double* mass)
{
    return guard([&] {
        need(lattice, "lattice");
        need(mass, "mass");
        *mass = lattice->field.total_mass();
        return QLG_OK;
    });
}

qlg_status qlg_lattice_write_snapshot(const qlg_lattice* lattice, const char* path)
{
    return guard([&] {
        need(lattice, "lattice");
        need(path, "path");
        qlg::write_lattice_snapshot(path, lattice->field);
        return QLG_OK;
    });
}

qlg_status qlg_fdm_create_1d(int nx, double ds, double dt, double c_s, double nu, const double* rho0, size_t n,
                             double rho_b, double rho_a, int substeps, qlg_fdm** out)
{
    return guard([&] {
        need(out, "out");
        need(rho0, "rho0");
        *out = nullptr;
        if (nx < 2)
            qlg::fail(qlg::ErrorCode::InvalidArgument, "fdm nx must be at least 2");
        need_size(n, static_cast<size_t>(nx), "rho0");
        qlg::FdmState2D s = qlg::make_fdm_state_1d(nx, ds, dt, c_s, nu, std::vector<double>(rho0, rho0 + n), rho_b,
                                                   rho_a, std::max(substeps, 0));
        *out = new qlg_fdm{std::move(s)};
        return QLG_OK;
    });
}

qlg_status qlg_fdm_create_2d(int nx, int ny, double ds, double dt, const qlg_pde_coeffs_2d* coeffs,
                             const double* rho0, size_t n, double rho_b, double rho_a, int substeps, qlg_fdm** out)
{
    return guard([&] {
        need(out, "out");
        need(rho0, "rho0");
        *out = nullptr;
        if (nx < 2 || ny < 1)
            qlg::fail(qlg::ErrorCode::InvalidArgument, "fdm grid needs nx >= 2 and ny >= 1");
        need_size(n, static_cast<size_t>(nx) * static_cast<size_t>(ny), "rho0");
        qlg::FdmState2D s = qlg::make_fdm_state(nx, ny, ds, dt, coeffs_of(coeffs), std::vector<double>(rho0, rho0 + n),
                                                rho_b, rho_a, std::max(substeps, 0));
        *out = new qlg_fdm{std::move(s)};
        return QLG_OK;
    });
}

void qlg_fdm_destroy(qlg_fdm* fdm) { delete fdm; }

qlg_status qlg_fdm_step(qlg_fdm* fdm, long n_steps)
{
    return guard([&] {
        need(fdm, "fdm");
        if (n_steps < 0)
            qlg::fail(qlg::ErrorCode::InvalidArgument, "n_steps must be non-negative");
        for (long k = 0; k < n_steps; ++k)
            if (!qlg::advance(fdm->state))
                return set_error(QLG_ERR_DIVERGED,
                                 "fdm diverged at step " + std::to_string(*fdm->state.diverged_at));
        return QLG_OK;
    });
}

qlg_status qlg_fdm_info(const qlg_fdm* fdm, qlg_grid_info* info, int* substeps)
{
    return guard([&] {
        need(fdm, "fdm");
        const auto& s = fdm->state;
        if (info)
            *info = {s.nx, s.ny, s.ds, s.dt, s.step};
        if (substeps)
            *substeps = s.substeps;
        return QLG_OK;
    });
}

qlg_status qlg_fdm_diverged_at(const qlg_fdm* fdm, int* has_diverged, long* step)
{
    return guard([&] {
        need(fdm, "fdm");
        need(has_diverged, "has_diverged");
        *has_diverged = fdm->state.diverged_at ? 1 : 0;
        if (fdm->state.diverged_at && step)
            *step = *fdm->state.diverged_at;
        return QLG_OK;
    });
}

qlg_status qlg_fdm_density(const qlg_fdm* fdm, double* rho, size_t n)
{
    return guard([&] {
        need(fdm, "fdm");
        need(rho, "rho");
        need_size(n, fdm->state.rho.size(), "density buffer");
        std::copy(fdm->state.rho.begin(), fdm->state.rho.end(), rho);
        return QLG_OK;
    });
}

qlg_status qlg_analytic_density(const qlg_analytic_config* cfg, const double* xs, size_t n, double t, double* rho)
{
    return guard([&] {
        if (n > 0) {
            need(xs, "xs");
            need(rho, "rho");
        }
        qlg::ColeHopfSolution sol(analytic_of(cfg));
        std::vector<double> r = sol.density(std::span<const double>(xs, n), t);
        std::copy(r.begin(), r.end(), rho);
        return QLG_OK;
    });
}

qlg_status qlg_bessel_ratio(int l, double a, double* ratio)
{
    return guard([&] {
        need(ratio, "ratio");
        *ratio = qlg::bessel_ratio(l, a);
        return QLG_OK;
    });
}

qlg_status qlg_trace_create(int nx, int ny, double dx, double dt, qlg_trace** out)
{
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        *out = new qlg_trace{qlg::DensityTrace(nx, ny, dx, dt)};
        return QLG_OK;
    });
}

void qlg_trace_destroy(qlg_trace* trace) { delete trace; }

qlg_status qlg_trace_append(qlg_trace* trace, long step, const double* rho, size_t n)
{
    return guard([&] {
        need(trace, "trace");
        need(rho, "rho");
        trace->trace.append(step, std::vector<double>(rho, rho + n));
        return QLG_OK;
    });
}

qlg_status qlg_trace_size(const qlg_trace* trace, size_t* size)
{
    return guard([&] {
        need(trace, "trace");
        need(size, "size");
        *size = trace->trace.size();
        return QLG_OK;
    });
}

qlg_status qlg_trace_viscosity(const qlg_trace* trace, const qlg_collision_params* params,
                               qlg_viscosity_variant variant, qlg_viscosity_estimate* out)
{
    return guard([&] {
        need(trace, "trace");
        need(out, "out");
        qlg::ViscosityEstimate e = qlg::experimental_viscosity(trace->trace, params_of(params), variant_of(variant));
        *out = {e.nu.value_or(0.0), e.nu ? 1 : 0, e.kept_fraction, e.skipped_steps};
        return QLG_OK;
    });
}

qlg_status qlg_trace_steepness(const qlg_trace* trace, double* delta)
{
    return guard([&] {
        need(trace, "trace");
        need(delta, "delta");
        *delta = qlg::shock_steepness(trace->trace);
        return QLG_OK;
    });
}

qlg_status qlg_trace_shock_formation(const qlg_trace* trace, size_t* index, long* step)
{
    return guard([&] {
        need(trace, "trace");
        if (trace->trace.size() == 0)
            qlg::fail(qlg::ErrorCode::InvalidArgument, "shock formation needs a non-empty trace");
        const size_t k = qlg::shock_formation_index(trace->trace);
        if (index)
            *index = k;
        if (step)
            *step = trace->trace.steps[k];
        return QLG_OK;
    });
}

qlg_status qlg_analytic_config_for(const qlg_trace* trace, double rho_b, double rho_a,
                                   const qlg_collision_params* params, qlg_nu_variant variant, int l_trunc,
                                   qlg_analytic_config* out)
{
    return guard([&] {
        need(trace, "trace");
        need(out, "out");
        qlg::AnalyticConfig c =
            qlg::analytic_config_for(trace->trace, rho_b, rho_a, params_of(params),
                                     variant == QLG_NU_YEPEZ ? qlg::NuVariant::Yepez : qlg::NuVariant::Corrected,
                                     l_trunc);
        *out = {c.lx, c.rho_a, c.rho_b, c.c, c.alpha, c.nu, c.l_trunc};
        return QLG_OK;
    });
}

qlg_status qlg_trace_mse(const qlg_trace* trace, const qlg_analytic_config* cfg, qlg_metric* out, size_t capacity,
                         size_t* count)
{
    return guard([&] {
        need(trace, "trace");
        return write_metrics(qlg::mse_compare(trace->trace, analytic_of(cfg)), out, capacity, count);
    });
}

qlg_status qlg_trace_l2_compare(const qlg_trace* qlg_tr, const qlg_trace* fdm, double rho_b, int has_diverged,
                                long fdm_diverged_at, qlg_metric* out, size_t capacity, size_t* count)
{
    return guard([&] {
        need(qlg_tr, "qlg");
        need(fdm, "fdm");
        std::optional<long> div;
        if (has_diverged)
            div = fdm_diverged_at;
        return write_metrics(qlg::l2_compare_2d(qlg_tr->trace, fdm->trace, rho_b, div), out, capacity, count);
    });
}

qlg_status qlg_calibrate_viscosity_estimator(const double* thetas, size_t n_thetas, int nx, double rho_b,
                                             double rho_a, int steps, qlg_calibration_case* cases, int* selected)
{
    return guard([&] {
        need(thetas, "thetas");
        need(cases, "cases");
        need(selected, "selected");
        qlg::CalibrationResult r =
            qlg::calibrate_viscosity_estimator(std::span<const double>(thetas, n_thetas), nx, rho_b, rho_a, steps);
        for (size_t i = 0; i < r.cases.size(); ++i) {
            const auto& c = r.cases[i];
            cases[i] = {thetas[i / 2], variant_to_c(c.variant), c.nu_true, c.nu_est.value_or(0.0),
                        c.nu_est ? 1 : 0,  c.rel_error,               c.kept_fraction};
        }
        *selected = r.selected ? static_cast<int>(variant_to_c(*r.selected)) : -1;
        return QLG_OK;
    });
}

void qlg_viscosity_sweep_defaults(qlg_viscosity_sweep_config* cfg)
{
    if (!cfg)
        return;
    qlg::ViscositySweepConfig d;
    *cfg = {};
    cfg->nx = d.nx;
    cfg->lx = d.lx;
    cfg->rho_b = d.rho_b;
    cfg->rho_a = d.rho_a;
    cfg->zeta = d.zeta;
    cfg->xi = d.xi;
    cfg->steps = d.steps;
    cfg->variant = variant_to_c(d.variant);
    cfg->options = {QLG_STREAM_ALONG, QLG_PATH_CLOSED_FORM};
    cfg->init = QLG_INIT_EQUILIBRIUM;
}

qlg_status qlg_viscosity_sweep(const qlg_viscosity_sweep_config* cfg, int threads, qlg_sweep_row* rows)
{
    return guard([&] {
        need(cfg, "cfg");
        if (cfg->n_thetas > 0) {
            need(cfg->thetas, "thetas");
            need(rows, "rows");
        }
        qlg::ViscositySweepConfig c;
        c.thetas.assign(cfg->thetas, cfg->thetas + cfg->n_thetas);
        c.nx = cfg->nx;
        c.lx = cfg->lx;
        c.rho_b = cfg->rho_b;
        c.rho_a = cfg->rho_a;
        c.zeta = cfg->zeta;
        c.xi = cfg->xi;
        c.steps = cfg->steps;
        c.variant = variant_of(cfg->variant);
        c.step_options = options_of(cfg->options);
        c.init = init_of(cfg->init);
        std::vector<qlg::SweepRow> r = qlg::viscosity_sweep(c, threads);
        for (size_t i = 0; i < r.size(); ++i) {
            qlg_sweep_row& o = rows[i];
            o.theta = r[i].theta;
            o.nu_pred = r[i].nu_pred;
            o.nu_yepez = r[i].nu_yepez;
            o.nu_exp = r[i].nu_exp.value_or(0.0);
            o.has_nu_exp = r[i].nu_exp ? 1 : 0;
            o.kept_fraction = r[i].kept_fraction;
            o.steps = r[i].steps;
            copy_text(o.error, r[i].error);
        }
        return QLG_OK;
    });
}

qlg_status qlg_steepness_sweep(const qlg_steepness_sweep_config* cfg, int threads, qlg_steepness_row* rows)
{
    return guard([&] {
        need(cfg, "cfg");
        need(cfg->nxs, "nxs");
        need(cfg->horizons, "horizons");
        if (cfg->n_thetas > 0) {
            need(cfg->thetas, "thetas");
            need(rows, "rows");
        }
        qlg::SteepnessSweepConfig c;
        c.thetas.assign(cfg->thetas, cfg->thetas + cfg->n_thetas);
        c.nxs.assign(cfg->nxs, cfg->nxs + cfg->n_nxs);
        c.horizons.assign(cfg->horizons, cfg->horizons + cfg->n_horizons);
        c.lx = cfg->lx;
        c.rho_b = cfg->rho_b;
        c.rho_a = cfg->rho_a;
        c.zeta = cfg->zeta;
        c.xi = cfg->xi;
        c.step_options = options_of(cfg->options);
        c.init = init_of(cfg->init);
        std::vector<qlg::SteepnessRow> r = qlg::steepness_sweep(c, threads);
        for (size_t i = 0; i < r.size(); ++i) {
            qlg_steepness_row& o = rows[i];
            o.theta = r[i].theta;
            o.nx = r[i].nx;
            o.steps = r[i].steps;
            o.delta = r[i].delta;
            copy_text(o.error, r[i].error);
        }
        return QLG_OK;
    });
}

qlg_status qlg_write_density_snapshot(const char* path, double t, int nx, int ny, double dx, const double* rho,
                                      size_t n)
{
    return guard([&] {
        need(path, "path");
        need(rho, "rho");
        qlg::write_density_snapshot(path, t, nx, ny, dx, std::span<const double>(rho, n));
        return QLG_OK;
    });
}

qlg_status qlg_write_metric_csv(const char* path, const qlg_metric* rows, size_t n)
{
    return guard([&] {
        need(path, "path");
        if (n > 0)
            need(rows, "rows");
        std::vector<qlg::TimeMetric> m(n);
        for (size_t i = 0; i < n; ++i) {
            m[i].t = rows[i].t;
            if (rows[i].defined)
                m[i].value = rows[i].value;
        }
        qlg::write_metric_csv(path, m);
        return QLG_OK;
    });
}

qlg_status qlg_write_sweep_csv(const char* path, const qlg_sweep_row* rows, size_t n)
{
    return guard([&] {
        need(path, "path");
        if (n > 0)
            need(rows, "rows");
        std::vector<qlg::SweepRow> r(n);
        for (size_t i = 0; i < n; ++i) {
            r[i].theta = rows[i].theta;
            r[i].nu_pred = rows[i].nu_pred;
            r[i].nu_yepez = rows[i].nu_yepez;
            if (rows[i].has_nu_exp)
                r[i].nu_exp = rows[i].nu_exp;
            r[i].kept_fraction = rows[i].kept_fraction;
            r[i].steps = rows[i].steps;
            r[i].error = rows[i].error;
        }
        qlg::write_sweep_csv(path, r);
        return QLG_OK;
    });
}

qlg_status qlg_write_steepness_csv(const char* path, const qlg_steepness_row* rows, size_t n)
{
    return guard([&] {
        need(path, "path");
        if (n > 0)
            need(rows, "rows");
        std::vector<qlg::SteepnessRow> r(n);
        for (size_t i = 0; i < n; ++i)
            r[i] = {rows[i].theta, rows[i].nx, rows[i].steps, rows[i].delta, rows[i].error};
        qlg::write_steepness_csv(path, r);
        return QLG_OK;
    });
}

qlg_status qlg_read_density_snapshot(const char* path, qlg_density_snapshot* out)
{
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = {};
        qlg::DensitySnapshot s = qlg::read_density_snapshot(path);
        auto* buf = static_cast<double*>(std::malloc(s.rho.size() * sizeof(double)));
        if (!buf)
            throw std::bad_alloc();
        std::copy(s.rho.begin(), s.rho.end(), buf);
        *out = {s.t, s.nx, s.ny, s.dx, buf};
        return QLG_OK;
    });
}

void qlg_density_snapshot_free(qlg_density_snapshot* snapshot)
{
    if (!snapshot)
        return;
    std::free(snapshot->rho);
    snapshot->rho = nullptr;
}

qlg_status qlg_snapshot_filename(const char* run_id, long step, char* buf, size_t buf_size)
{
    return guard([&] {
        need(run_id, "run_id");
        need(buf, "buf");
        const std::string name = qlg::snapshot_filename(run_id, step);
        if (name.size() + 1 > buf_size)
            return set_error(QLG_ERR_BUFFER_TOO_SMALL, "filename buffer too small");
        std::memcpy(buf, name.c_str(), name.size() + 1);
        return QLG_OK;
    });
}

} // extern "C"
