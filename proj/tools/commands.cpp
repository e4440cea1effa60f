#include "commands.hpp"

#include "qlg/qlg.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace qlgsim {

namespace fs = std::filesystem;

namespace {

class ApiError : public std::runtime_error {
public:
    ApiError(qlg_status status, const std::string& what) : std::runtime_error(what), status(status) {}
    qlg_status status;
};

void check(qlg_status st)
{
    if (st != QLG_OK)
        throw ApiError(st, std::string(qlg_status_name(st)) + ": " + qlg_last_error());
}

// Setup-time rejections come from config values; charge them to `key`.
void check_config(qlg_status st, const std::string& key)
{
    if (st == QLG_ERR_INVALID_ARGUMENT || st == QLG_ERR_COLLISION_RANGE || st == QLG_ERR_NUMERICAL)
        throw ConfigError(key, qlg_last_error());
    check(st);
}

using Lattice = std::unique_ptr<qlg_lattice, decltype(&qlg_lattice_destroy)>;
using Fdm = std::unique_ptr<qlg_fdm, decltype(&qlg_fdm_destroy)>;
using Trace = std::unique_ptr<qlg_trace, decltype(&qlg_trace_destroy)>;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t)
{
    return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Context {
    std::string command;
    const Json& cfg;
    RunOptions opts;
    fs::path out;
    std::string run_id;

    Json outputs = Json::array();
    Json summary = Json::object();
    Json diverged_at = nullptr;

    bool started = false;
    Clock::time_point t0 = Clock::now();
    Clock::time_point t_run{};
    double setup_s = 0.0;
    double write_s = 0.0;

    // Ends setup: everything up to here was validation and construction.
    void begin_run()
    {
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec || !fs::is_directory(out))
            throw ConfigError("--out", "cannot create directory '" + out.string() + "': " + ec.message());
        started = true;
        setup_s = seconds_since(t0);
        t_run = Clock::now();
    }

    std::string output(const std::string& name)
    {
        const fs::path p = out / name;
        std::error_code ec;
        if (!opts.config_path.empty() && fs::exists(p) && fs::equivalent(p, opts.config_path, ec))
            throw ConfigError("--out", "writing '" + name + "' would overwrite the input config");
        outputs.push_back(name);
        return p.string();
    }

    class WriteTimer {
    public:
        explicit WriteTimer(double& acc) : acc_(acc), start_(Clock::now()) {}
        ~WriteTimer() { acc_ += seconds_since(start_); }
        WriteTimer(const WriteTimer&) = delete;
        WriteTimer& operator=(const WriteTimer&) = delete;

    private:
        double& acc_;
        Clock::time_point start_;
    };

    WriteTimer writing() { return WriteTimer(write_s); }
};

std::string snapshot_name(const std::string& run_id, long step)
{
    char buf[512];
    check(qlg_snapshot_filename(run_id.c_str(), step, buf, sizeof buf));
    return buf;
}

std::vector<long> schedule(const Json& cfg)
{
    const long steps = get_int(cfg, "steps");
    const long every = get_int(cfg, "output_every");
    std::vector<long> s;
    for (long k = 0; k <= steps; k += every)
        s.push_back(k);
    if (s.back() != steps)
        s.push_back(steps);
    return s;
}

qlg_collision_params collision(const Json& cfg, double theta, const std::string& key)
{
    qlg_collision_params p{theta, get_angle(cfg, "zeta"), get_angle(cfg, "xi")};
    double alpha = 0.0;
    check_config(qlg_alpha(&p, &alpha), key);
    return p;
}

// Initial densities rho_b +- modes * rho_a must be admissible populations.
void check_density(const Json& cfg, int modes)
{
    const double rho_b = get_real(cfg, "rho_b");
    const double rho_a = get_real(cfg, "rho_a");
    if (rho_b < 0.0 || rho_b > 2.0)
        throw ConfigError("rho_b", "must lie in [0, 2]");
    const double lo = rho_b - modes * rho_a;
    const double hi = rho_b + modes * rho_a;
    if (lo < 0.0 || hi > 2.0) {
        std::ostringstream os;
        os << "initial density spans [" << lo << ", " << hi << "], outside [0, 2]";
        throw ConfigError("rho_a", os.str());
    }
}

qlg_step_options step_options(const Json& cfg)
{
    qlg_step_options o{};
    o.streaming = get_text(cfg, "streaming") == "against" ? QLG_STREAM_AGAINST : QLG_STREAM_ALONG;
    o.path = get_text(cfg, "collision_path") == "quantum" ? QLG_PATH_QUANTUM : QLG_PATH_CLOSED_FORM;
    return o;
}

qlg_init_mode init_mode(const Json& cfg)
{
    if (cfg.contains("init") && get_text(cfg, "init") == "symmetric")
        return QLG_INIT_SYMMETRIC;
    return QLG_INIT_EQUILIBRIUM;
}

Lattice make_lattice_1d(const Json& cfg, const qlg_collision_params& p)
{
    qlg_lattice* raw = nullptr;
    check_config(qlg_lattice_create_1d(get_int(cfg, "nx"), get_real(cfg, "lx"), get_real(cfg, "rho_b"),
                                       get_real(cfg, "rho_a"), &p, init_mode(cfg), &raw),
                 "rho_a");
    Lattice lat(raw, qlg_lattice_destroy);
    if (cfg.contains("streaming")) {
        const qlg_step_options o = step_options(cfg);
        check(qlg_lattice_set_options(lat.get(), &o));
    }
    return lat;
}

Lattice make_lattice_2d(const Json& cfg, const qlg_collision_params& p, const std::string& vset)
{
    qlg_lattice* raw = nullptr;
    check_config(qlg_lattice_create_2d(get_int(cfg, "nx"), get_int(cfg, "ny"), get_real(cfg, "ds"),
                                       get_real(cfg, "rho_b"), get_real(cfg, "rho_a"), &p, vset.c_str(),
                                       init_mode(cfg), &raw),
                 "rho_a");
    Lattice lat(raw, qlg_lattice_destroy);
    if (cfg.contains("streaming")) {
        const qlg_step_options o = step_options(cfg);
        check(qlg_lattice_set_options(lat.get(), &o));
    }
    return lat;
}

qlg_grid_info info_of(const qlg_lattice* lat)
{
    qlg_grid_info g{};
    check(qlg_lattice_info(lat, &g));
    return g;
}

std::vector<double> density_of(const qlg_lattice* lat)
{
    const qlg_grid_info g = info_of(lat);
    std::vector<double> rho(static_cast<std::size_t>(g.nx) * g.ny);
    check(qlg_lattice_density(lat, rho.data(), rho.size()));
    return rho;
}

Trace make_trace(const qlg_grid_info& g)
{
    qlg_trace* raw = nullptr;
    check(qlg_trace_create(g.nx, g.ny, g.dx, g.dt, &raw));
    return Trace(raw, qlg_trace_destroy);
}

Json metric_json(const qlg_metric& m)
{
    return m.defined ? Json(m.value) : Json(nullptr);
}

// Conditions for the Cole-Hopf solution on top of the lattice ones.
qlg_analytic_config analytic_setup(const Json& cfg, const qlg_collision_params& p, const std::string& nu_variant)
{
    const int nx = get_int(cfg, "nx");
    const double lx = get_real(cfg, "lx");
    const double dx = lx / nx;
    const double dt = dx * dx;
    double alpha = 0.0;
    check(qlg_alpha(&p, &alpha));
    if (alpha == 0.0)
        throw ConfigError("theta", "the analytic solution needs alpha = cot(theta) cos(zeta - xi) != 0");
    if (!(get_real(cfg, "rho_a") > 0.0))
        throw ConfigError("rho_a", "must be positive for the analytic solution");
    qlg_pde_coeffs_1d co{};
    check_config(qlg_predicted_coefficients_1d(&p, dx, dt, &co), "lx");
    const double nu = nu_variant == "yepez" ? co.nu_yepez : co.nu;
    if (!(nu > 0.0))
        throw ConfigError("theta", "the analytic solution needs a positive viscosity");
    qlg_analytic_config a{lx, get_real(cfg, "rho_a"), get_real(cfg, "rho_b"), dx / dt, alpha, nu,
                          cfg.contains("l_trunc") ? get_int(cfg, "l_trunc") : 80};

    std::vector<double> xs(nx), rho(nx);
    for (int i = 0; i < nx; ++i)
        xs[i] = i * dx;
    check_config(qlg_analytic_density(&a, xs.data(), xs.size(), 0.0, rho.data()), "rho_a");
    return a;
}

void write_gnuplot(Context& ctx, const std::string& body)
{
    if (!ctx.opts.gnuplot)
        return;
    auto w = ctx.writing();
    std::ofstream f(ctx.output(ctx.run_id + ".gp"));
    f << "set datafile separator \",\"\nset key autotitle columnhead\n" << body;
    if (!f)
        throw ApiError(QLG_ERR_IO, "cannot write gnuplot script");
}

std::string quoted_list(const std::vector<std::string>& names)
{
    std::string s;
    for (const auto& n : names)
        s += (s.empty() ? "" : " ") + n;
    return "\"" + s + "\"";
}

int run_simulate(Context& ctx, bool two_d)
{
    const Json& cfg = ctx.cfg;
    const qlg_collision_params p = collision(cfg, get_angle(cfg, "theta"), "theta");
    check_density(cfg, two_d ? 2 : 1);
    Lattice lat = two_d ? make_lattice_2d(cfg, p, get_text(cfg, "velocity_set")) : make_lattice_1d(cfg, p);
    double mass0 = 0.0;
    check(qlg_lattice_total_mass(lat.get(), &mass0));

    ctx.begin_run();
    std::vector<std::string> files;
    long at = 0;
    for (long s : schedule(cfg)) {
        check(qlg_lattice_step(lat.get(), s - at));
        at = s;
        files.push_back(snapshot_name(ctx.run_id, s));
        auto w = ctx.writing();
        check(qlg_lattice_write_snapshot(lat.get(), ctx.output(files.back()).c_str()));
    }
    double mass1 = 0.0;
    check(qlg_lattice_total_mass(lat.get(), &mass1));
    ctx.summary["snapshots"] = files.size();
    ctx.summary["mass_initial"] = mass0;
    ctx.summary["mass_final"] = mass1;

    if (two_d)
        write_gnuplot(ctx, "set pm3d map\nsplot '" + files.back() + "' using 2:3:4 with pm3d title 'rho'\n");
    else
        write_gnuplot(ctx, "plot for [f in " + quoted_list(files) + "] f using 2:3 with lines title f\n");
    return kExitOk;
}

int run_fdm(Context& ctx, bool two_d)
{
    const Json& cfg = ctx.cfg;
    const qlg_collision_params p = collision(cfg, get_angle(cfg, "theta"), "theta");
    check_density(cfg, two_d ? 2 : 1);
    // The lattice supplies the same initial density the QLG runs start from.
    Lattice lat = two_d ? make_lattice_2d(cfg, p, get_text(cfg, "velocity_set")) : make_lattice_1d(cfg, p);
    const qlg_grid_info g = info_of(lat.get());
    const std::vector<double> rho0 = density_of(lat.get());
    const double rho_b = get_real(cfg, "rho_b");
    const double rho_a = get_real(cfg, "rho_a");
    const int substeps = get_int(cfg, "substeps");

    qlg_fdm* raw = nullptr;
    if (two_d) {
        qlg_pde_coeffs_2d co{};
        check_config(qlg_predicted_coefficients_2d(get_text(cfg, "velocity_set").c_str(), &p, g.dx, g.dt, 1, &co),
                     "velocity_set");
        check_config(qlg_fdm_create_2d(g.nx, g.ny, g.dx, g.dt, &co, rho0.data(), rho0.size(), rho_b, rho_a,
                                       substeps, &raw),
                     "substeps");
        ctx.summary["a"] = {co.a[0], co.a[1]};
        ctx.summary["b"] = {co.b[0], co.b[1]};
        ctx.summary["D"] = {{co.D[0][0], co.D[0][1]}, {co.D[1][0], co.D[1][1]}};
    } else {
        qlg_pde_coeffs_1d co{};
        check_config(qlg_predicted_coefficients_1d(&p, g.dx, g.dt, &co), "lx");
        const double nu = get_text(cfg, "nu_variant") == "yepez" ? co.nu_yepez : co.nu;
        check_config(qlg_fdm_create_1d(g.nx, g.dx, g.dt, co.c_s, nu, rho0.data(), rho0.size(), rho_b, rho_a,
                                       substeps, &raw),
                     "substeps");
        ctx.summary["c_s"] = co.c_s;
        ctx.summary["nu"] = nu;
    }
    Fdm fdm(raw, qlg_fdm_destroy);
    int used = 0;
    check(qlg_fdm_info(fdm.get(), nullptr, &used));
    ctx.summary["substeps"] = used;

    ctx.begin_run();
    std::vector<std::string> files;
    std::vector<double> rho(rho0.size());
    long at = 0;
    bool diverged = false;
    for (long s : schedule(cfg)) {
        const qlg_status st = qlg_fdm_step(fdm.get(), s - at);
        at = s;
        if (st == QLG_ERR_DIVERGED) {
            diverged = true;
            break;
        }
        check(st);
        check(qlg_fdm_density(fdm.get(), rho.data(), rho.size()));
        files.push_back(snapshot_name(ctx.run_id, s));
        auto w = ctx.writing();
        check(qlg_write_density_snapshot(ctx.output(files.back()).c_str(), static_cast<double>(s) * g.dt, g.nx, g.ny,
                                         g.dx, rho.data(), rho.size()));
    }
    if (diverged) {
        int has = 0;
        long step = 0;
        check(qlg_fdm_diverged_at(fdm.get(), &has, &step));
        ctx.diverged_at = step;
    }
    ctx.summary["snapshots"] = files.size();

    if (two_d)
        write_gnuplot(ctx, "set pm3d map\nsplot '" + files.back() + "' using 2:3:4 with pm3d title 'rho'\n");
    else
        write_gnuplot(ctx, "plot for [f in " + quoted_list(files) + "] f using 2:3 with lines title f\n");
    return diverged ? kExitDiverged : kExitOk;
}

int run_analytic(Context& ctx)
{
    const Json& cfg = ctx.cfg;
    const qlg_collision_params p = collision(cfg, get_angle(cfg, "theta"), "theta");
    const qlg_analytic_config a = analytic_setup(cfg, p, get_text(cfg, "nu_variant"));
    const int nx = get_int(cfg, "nx");
    const double dx = a.lx / nx;
    const double dt = dx * dx;
    std::vector<double> xs(nx), rho(nx);
    for (int i = 0; i < nx; ++i)
        xs[i] = i * dx;

    ctx.begin_run();
    std::vector<std::string> files;
    for (long s : schedule(cfg)) {
        const double t = static_cast<double>(s) * dt;
        check(qlg_analytic_density(&a, xs.data(), xs.size(), t, rho.data()));
        files.push_back(snapshot_name(ctx.run_id, s));
        auto w = ctx.writing();
        check(qlg_write_density_snapshot(ctx.output(files.back()).c_str(), t, nx, 1, dx, rho.data(), rho.size()));
    }
    ctx.summary["snapshots"] = files.size();
    ctx.summary["nu"] = a.nu;
    ctx.summary["c"] = a.c;
    ctx.summary["alpha"] = a.alpha;
    write_gnuplot(ctx, "plot for [f in " + quoted_list(files) + "] f using 2:3 with lines title f\n");
    return kExitOk;
}

std::vector<double> checked_thetas(const Json& cfg)
{
    const std::vector<double> thetas = get_thetas(cfg);
    const bool listed = cfg.contains("thetas");
    for (std::size_t i = 0; i < thetas.size(); ++i)
        collision(cfg, thetas[i], listed ? "thetas[" + std::to_string(i) + "]" : std::string("theta_range"));
    return thetas;
}

int run_viscosity_sweep(Context& ctx)
{
    const Json& cfg = ctx.cfg;
    const std::vector<double> thetas = checked_thetas(cfg);
    check_density(cfg, 1);
    qlg_viscosity_sweep_config c;
    qlg_viscosity_sweep_defaults(&c);
    c.thetas = thetas.data();
    c.n_thetas = thetas.size();
    c.nx = get_int(cfg, "nx");
    c.lx = get_real(cfg, "lx");
    c.rho_b = get_real(cfg, "rho_b");
    c.rho_a = get_real(cfg, "rho_a");
    c.zeta = get_angle(cfg, "zeta");
    c.xi = get_angle(cfg, "xi");
    c.steps = get_int(cfg, "steps");
    c.variant = get_text(cfg, "estimator") == "as_printed" ? QLG_VISC_AS_PRINTED : QLG_VISC_PDE_CONSISTENT;
    c.options = step_options(cfg);
    c.init = init_mode(cfg);

    ctx.begin_run();
    std::vector<qlg_sweep_row> rows(thetas.size());
    check(qlg_viscosity_sweep(&c, ctx.opts.threads, rows.data()));
    const std::string name = ctx.run_id + "_sweep.csv";
    {
        auto w = ctx.writing();
        check(qlg_write_sweep_csv(ctx.output(name).c_str(), rows.data(), rows.size()));
    }
    int with_estimate = 0;
    Json failures = Json::array();
    for (const auto& r : rows) {
        with_estimate += r.has_nu_exp ? 1 : 0;
        if (r.error[0])
            failures.push_back({{"theta", r.theta}, {"error", r.error}});
    }
    ctx.summary["rows"] = rows.size();
    ctx.summary["rows_with_estimate"] = with_estimate;
    ctx.summary["failures"] = failures;
    write_gnuplot(ctx, "set xlabel 'theta'\nset logscale y\nplot '" + name + "' using 1:2 with lines, '" + name +
                           "' using 1:3 with lines, '" + name + "' using 1:4 with points\n");
    return kExitOk;
}

int run_steepness_sweep(Context& ctx)
{
    const Json& cfg = ctx.cfg;
    const std::vector<double> thetas = checked_thetas(cfg);
    check_density(cfg, 1);
    const std::vector<int> nxs = get_int_list(cfg, "nxs");
    const std::vector<int> horizons = get_int_list(cfg, "horizons");
    qlg_steepness_sweep_config c{};
    c.thetas = thetas.data();
    c.n_thetas = thetas.size();
    c.nxs = nxs.data();
    c.n_nxs = nxs.size();
    c.horizons = horizons.data();
    c.n_horizons = horizons.size();
    c.lx = get_real(cfg, "lx");
    c.rho_b = get_real(cfg, "rho_b");
    c.rho_a = get_real(cfg, "rho_a");
    c.zeta = get_angle(cfg, "zeta");
    c.xi = get_angle(cfg, "xi");
    c.options = step_options(cfg);
    c.init = init_mode(cfg);

    ctx.begin_run();
    std::vector<qlg_steepness_row> rows(thetas.size() * nxs.size() * horizons.size());
    check(qlg_steepness_sweep(&c, ctx.opts.threads, rows.data()));
    const std::string name = ctx.run_id + "_steepness.csv";
    {
        auto w = ctx.writing();
        check(qlg_write_steepness_csv(ctx.output(name).c_str(), rows.data(), rows.size()));
    }
    Json failures = Json::array();
    for (const auto& r : rows)
        if (r.error[0])
            failures.push_back({{"theta", r.theta}, {"nx", r.nx}, {"T", r.steps}, {"error", r.error}});
    ctx.summary["rows"] = rows.size();
    ctx.summary["failures"] = failures;

    std::string plot = "set xlabel 'theta'\nset ylabel 'Delta'\nplot";
    bool first = true;
    for (int nx : nxs)
        for (int t : horizons) {
            plot += std::string(first ? " " : ", ") + "'" + name + "' using 1:($2==" + std::to_string(nx) +
                    " && $3==" + std::to_string(t) + " ? $4 : 1/0) with linespoints title 'nx=" +
                    std::to_string(nx) + " T=" + std::to_string(t) + "'";
            first = false;
        }
    write_gnuplot(ctx, plot + "\n");
    return kExitOk;
}

int run_compare_analytic(Context& ctx)
{
    const Json& cfg = ctx.cfg;
    const qlg_collision_params p = collision(cfg, get_angle(cfg, "theta"), "theta");
    check_density(cfg, 1);
    analytic_setup(cfg, p, "corrected");
    analytic_setup(cfg, p, "yepez");
    const int nx = get_int(cfg, "nx");
    const double dx = get_real(cfg, "lx") / nx;
    const double dt = dx * dx;
    const std::vector<long> steps = schedule(cfg);
    const qlg_grid_info g{nx, 1, dx, dt, 0};
    Trace trace = make_trace(g);

    const std::string dir = get_text(cfg, "snapshots_dir");
    Lattice lat(nullptr, qlg_lattice_destroy);
    if (dir.empty()) {
        lat = make_lattice_1d(cfg, p);
    } else {
        std::error_code ec;
        if (fs::exists(ctx.out) && fs::equivalent(dir, ctx.out, ec))
            throw ConfigError("snapshots_dir", "must differ from --out");
        for (long s : steps) {
            const fs::path path = fs::path(dir) / snapshot_name(ctx.run_id, s);
            qlg_density_snapshot snap{};
            if (qlg_read_density_snapshot(path.string().c_str(), &snap) != QLG_OK)
                throw ConfigError("snapshots_dir", qlg_last_error());
            std::unique_ptr<qlg_density_snapshot, decltype(&qlg_density_snapshot_free)> hold(
                &snap, qlg_density_snapshot_free);
            const double t = static_cast<double>(s) * dt;
            const bool grid_ok = snap.nx == nx && snap.ny == 1 && std::abs(snap.dx - dx) <= 1e-12 * dx;
            const bool time_ok = std::abs(snap.t - t) <= 1e-12 * std::max(1.0, t);
            if (!grid_ok || !time_ok)
                throw ConfigError("snapshots_dir", path.string() + " does not match nx, lx and the step schedule");
            check(qlg_trace_append(trace.get(), s, snap.rho, static_cast<std::size_t>(nx)));
        }
    }
    const int l_trunc = get_int(cfg, "l_trunc");

    ctx.begin_run();
    if (lat) {
        long at = 0;
        for (long s : steps) {
            check(qlg_lattice_step(lat.get(), s - at));
            at = s;
            const std::vector<double> rho = density_of(lat.get());
            check(qlg_trace_append(trace.get(), s, rho.data(), rho.size()));
        }
    }
    std::size_t shock = 0;
    long shock_step = 0;
    check(qlg_trace_shock_formation(trace.get(), &shock, &shock_step));

    std::vector<std::vector<qlg_metric>> series;
    for (qlg_nu_variant v : {QLG_NU_CORRECTED, QLG_NU_YEPEZ}) {
        qlg_analytic_config a{};
        check(qlg_analytic_config_for(trace.get(), get_real(cfg, "rho_b"), get_real(cfg, "rho_a"), &p, v, l_trunc,
                                      &a));
        std::vector<qlg_metric> m(steps.size());
        std::size_t count = 0;
        check(qlg_trace_mse(trace.get(), &a, m.data(), m.size(), &count));
        m.resize(count);
        series.push_back(std::move(m));
    }
    const std::string names[2] = {ctx.run_id + "_mse_corrected.csv", ctx.run_id + "_mse_yepez.csv"};
    for (int k = 0; k < 2; ++k) {
        auto w = ctx.writing();
        check(qlg_write_metric_csv(ctx.output(names[k]).c_str(), series[k].data(), series[k].size()));
    }

    int after = 0, better = 0;
    for (std::size_t k = shock; k < series[0].size(); ++k) {
        ++after;
        if (series[0][k].defined && series[1][k].defined && series[0][k].value < series[1][k].value)
            ++better;
    }
    ctx.summary["source"] = lat ? "simulated" : "snapshots";
    ctx.summary["shock_formation_step"] = shock_step;
    ctx.summary["shock_formation_time"] = static_cast<double>(shock_step) * dt;
    ctx.summary["snapshots_after_shock"] = after;
    ctx.summary["corrected_better_after_shock"] = better;
    ctx.summary["mse_corrected_last"] = metric_json(series[0].back());
    ctx.summary["mse_yepez_last"] = metric_json(series[1].back());
    write_gnuplot(ctx, "set logscale y\nset xlabel 't'\nplot '" + names[0] + "' using 1:2 with lines title 'corrected', '" +
                           names[1] + "' using 1:2 with lines title 'yepez'\n");
    return kExitOk;
}

int run_compare_2d(Context& ctx)
{
    const Json& cfg = ctx.cfg;
    const qlg_collision_params p = collision(cfg, get_angle(cfg, "theta"), "theta");
    check_density(cfg, 2);
    const double rho_b = get_real(cfg, "rho_b");
    const double rho_a = get_real(cfg, "rho_a");
    const int substeps = get_int(cfg, "substeps");

    struct Run {
        std::string set;
        Lattice lat{nullptr, qlg_lattice_destroy};
        Fdm fdm{nullptr, qlg_fdm_destroy};
        Trace qlg{nullptr, qlg_trace_destroy};
        Trace ref{nullptr, qlg_trace_destroy};
        int substeps = 0;
    };
    std::vector<Run> runs;
    for (const std::string& set : get_text_list(cfg, "velocity_sets")) {
        Run r;
        r.set = set;
        r.lat = make_lattice_2d(cfg, p, set);
        const qlg_grid_info g = info_of(r.lat.get());
        const std::vector<double> rho0 = density_of(r.lat.get());
        qlg_pde_coeffs_2d co{};
        check_config(qlg_predicted_coefficients_2d(set.c_str(), &p, g.dx, g.dt, 1, &co), "velocity_sets");
        qlg_fdm* raw = nullptr;
        check_config(qlg_fdm_create_2d(g.nx, g.ny, g.dx, g.dt, &co, rho0.data(), rho0.size(), rho_b, rho_a,
                                       substeps, &raw),
                     "substeps");
        r.fdm.reset(raw);
        check(qlg_fdm_info(r.fdm.get(), nullptr, &r.substeps));
        r.qlg = make_trace(g);
        r.ref = make_trace(g);
        runs.push_back(std::move(r));
    }

    ctx.begin_run();
    const std::vector<long> steps = schedule(cfg);
    Json diverged = Json::object();
    bool any_diverged = false;
    for (Run& r : runs) {
        const qlg_grid_info g = info_of(r.lat.get());
        std::vector<double> rho(static_cast<std::size_t>(g.nx) * g.ny);
        bool alive = true;
        long at = 0;
        for (long s : steps) {
            check(qlg_lattice_step(r.lat.get(), s - at));
            check(qlg_lattice_density(r.lat.get(), rho.data(), rho.size()));
            check(qlg_trace_append(r.qlg.get(), s, rho.data(), rho.size()));
            if (alive) {
                const qlg_status st = qlg_fdm_step(r.fdm.get(), s - at);
                if (st == QLG_ERR_DIVERGED) {
                    alive = false;
                } else {
                    check(st);
                    check(qlg_fdm_density(r.fdm.get(), rho.data(), rho.size()));
                    check(qlg_trace_append(r.ref.get(), s, rho.data(), rho.size()));
                }
            }
            at = s;
        }
        int has = 0;
        long div_step = 0;
        check(qlg_fdm_diverged_at(r.fdm.get(), &has, &div_step));
        any_diverged = any_diverged || has;
        diverged[r.set] = has ? Json(div_step) : Json(nullptr);

        std::vector<qlg_metric> l2(steps.size());
        std::size_t count = 0;
        check(qlg_trace_l2_compare(r.qlg.get(), r.ref.get(), rho_b, has, div_step, l2.data(), l2.size(), &count));
        l2.resize(count);
        std::size_t shock = 0;
        long shock_step = 0;
        check(qlg_trace_shock_formation(r.qlg.get(), &shock, &shock_step));

        const std::string name = ctx.run_id + "_l2_" + r.set + ".csv";
        {
            auto w = ctx.writing();
            check(qlg_write_metric_csv(ctx.output(name).c_str(), l2.data(), l2.size()));
        }
        double worst = 0.0;
        for (const auto& m : l2)
            if (m.defined)
                worst = std::max(worst, m.value);
        ctx.summary[r.set] = {{"substeps", r.substeps},
                              {"shock_formation_step", shock_step},
                              {"diverged_at", diverged[r.set]},
                              {"snapshots_compared", l2.size()},
                              {"l2_max", worst},
                              {"l2_last", l2.empty() ? Json(nullptr) : metric_json(l2.back())}};
    }
    ctx.diverged_at = diverged;

    std::string plot = "set logscale y\nset xlabel 't'\nplot";
    for (std::size_t k = 0; k < runs.size(); ++k)
        plot += std::string(k ? ", " : " ") + "'" + ctx.run_id + "_l2_" + runs[k].set + ".csv' using 1:2 with lines title '" +
                runs[k].set + "'";
    write_gnuplot(ctx, plot + "\n");
    return any_diverged ? kExitDiverged : kExitOk;
}

int dispatch(Context& ctx)
{
    const std::string& c = ctx.command;
    if (c == "simulate1d")
        return run_simulate(ctx, false);
    if (c == "simulate2d")
        return run_simulate(ctx, true);
    if (c == "fdm1d")
        return run_fdm(ctx, false);
    if (c == "fdm2d")
        return run_fdm(ctx, true);
    if (c == "analytic")
        return run_analytic(ctx);
    if (c == "viscosity-sweep")
        return run_viscosity_sweep(ctx);
    if (c == "steepness-sweep")
        return run_steepness_sweep(ctx);
    if (c == "compare-analytic")
        return run_compare_analytic(ctx);
    if (c == "compare-2d")
        return run_compare_2d(ctx);
    throw ConfigError("command", "unknown command '" + c + "'");
}

void write_manifest(Context& ctx, int code, const std::string& error)
{
    const double total = seconds_since(ctx.t0);
    const double run = ctx.started ? seconds_since(ctx.t_run) - ctx.write_s : 0.0;
    Json m = Json::object();
    m["command"] = ctx.command;
    m["version"] = qlg_version();
    m["config"] = ctx.cfg;
    m["threads"] = ctx.opts.threads;
    m["exit_code"] = code;
    if (!error.empty())
        m["error"] = error;
    m["diverged_at"] = ctx.diverged_at;
    m["outputs"] = ctx.outputs;
    m["summary"] = ctx.summary;
    m["timings_s"] = {{"setup", ctx.setup_s}, {"run", run}, {"write", ctx.write_s}, {"total", total}};
    std::ofstream f(ctx.out / "manifest.json");
    f << m.dump(2) << '\n';
    if (!f)
        std::cerr << "qlgsim: cannot write " << (ctx.out / "manifest.json").string() << '\n';
}

} // namespace

int run_command(const std::string& command, const Json& resolved, const RunOptions& options)
{
    Context ctx{command, resolved, options, fs::path(options.out_dir), get_text(resolved, "run_id")};
    int code = kExitOk;
    std::string error;
    try {
        code = dispatch(ctx);
    } catch (const ConfigError& e) {
        if (!ctx.started)
            throw;
        code = kExitConfig;
        error = e.what();
    } catch (const ApiError& e) {
        code = e.status == QLG_ERR_DIVERGED ? kExitDiverged : kExitRuntime;
        error = e.what();
    } catch (const std::exception& e) {
        code = kExitRuntime;
        error = e.what();
    }
    if (!error.empty())
        std::cerr << "qlgsim " << command << ": " << error << '\n';
    else if (code == kExitDiverged)
        std::cerr << "qlgsim " << command << ": fdm diverged at " << ctx.diverged_at.dump() << '\n';
    if (ctx.started)
        write_manifest(ctx, code, error);
    return code;
}

} // namespace qlgsim
