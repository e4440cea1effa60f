#include "qlg/experiments.hpp"

#include "qlg/error.hpp"
#include "qlg/fdm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace qlg {

DensityTrace::DensityTrace(int nx_, int ny_, double dx_, double dt_) : nx(nx_), ny(ny_), dx(dx_), dt(dt_)
{
    if (nx < 1 || ny < 1)
        fail(ErrorCode::InvalidArgument, "trace dimensions must be positive");
    if (!(dx > 0.0) || !(dt > 0.0))
        fail(ErrorCode::InvalidArgument, "trace dx and dt must be positive");
}

void DensityTrace::append(long step, std::vector<double> field)
{
    if (field.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
        fail(ErrorCode::InvalidArgument, "trace snapshot size does not match nx * ny");
    if (!steps.empty()) {
        long gap = step - steps.back();
        if (gap <= 0 || (steps.size() >= 2 && gap != stride()))
            fail(ErrorCode::InvalidArgument, "trace snapshots must have a uniform positive stride");
    }
    steps.push_back(step);
    rho.push_back(std::move(field));
}

const char* to_string(ViscosityVariant v)
{
    return v == ViscosityVariant::AsPrinted ? "as_printed" : "pde_consistent";
}

namespace {

void require_1d(const DensityTrace& trace, std::size_t min_snapshots)
{
    if (trace.ny != 1)
        fail(ErrorCode::InvalidArgument, "estimator needs a 1D trace");
    if (trace.size() < min_snapshots) {
        std::ostringstream os;
        os << "trace too short: " << trace.size() << " snapshots, need " << min_snapshots;
        fail(ErrorCode::InvalidArgument, os.str());
    }
}

} // namespace

std::vector<std::optional<double>> pointwise_viscosity(const DensityTrace& trace, std::size_t k,
                                                       const CollisionParams& params, ViscosityVariant variant)
{
    require_1d(trace, 2);
    if (k + 1 >= trace.size())
        fail(ErrorCode::InvalidArgument, "pointwise_viscosity needs snapshot k + 1");
    const int n = trace.nx;
    const auto& r = trace.rho[k];
    const auto& rn = trace.rho[k + 1];
    const double s = static_cast<double>(trace.stride());
    const double sign = variant == ViscosityVariant::AsPrinted ? 1.0 : -1.0;
    const double a = params.alpha();
    const double scale = trace.dx * trace.dx / trace.dt;

    std::vector<std::optional<double>> out(n);
    for (int x = 0; x < n; ++x) {
        const double rm = r[(x + n - 1) % n];
        const double r0 = r[x];
        const double rp = r[(x + 1) % n];
        const double den = rm - 2.0 * r0 + rp;
        if (!(std::abs(den) >= kCurvatureGuard))
            continue;
        const double num = (rn[x] - r0) / s + sign * a * (r0 - 1.0) * (rp - r0);
        out[x] = scale * num / den;
    }
    return out;
}

SigmaFilter one_sigma_filter(std::span<const double> values)
{
    SigmaFilter f;
    f.kept.assign(values.size(), false);
    if (values.empty())
        return f;
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values)
        var += (v - mean) * (v - mean);
    f.stddev = std::sqrt(var / static_cast<double>(values.size()));

    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i] - mean) <= f.stddev) {
            f.kept[i] = true;
            sum += values[i];
            ++f.n_kept;
        }
    }
    if (f.n_kept > 0)
        f.mean = sum / f.n_kept;
    return f;
}

ViscosityEstimate experimental_viscosity(const DensityTrace& trace, const CollisionParams& params,
                                         ViscosityVariant variant)
{
    require_1d(trace, 2);
    ViscosityEstimate est;
    long total_valid = 0;
    long total_kept = 0;
    double sum = 0.0;
    int n_means = 0;
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        std::vector<double> vals;
        for (const auto& v : pointwise_viscosity(trace, k, params, variant))
            if (v && std::isfinite(*v))
                vals.push_back(*v);
        ViscosityStep st;
        st.step = trace.steps[k];
        st.n_valid = static_cast<int>(vals.size());
        SigmaFilter f = one_sigma_filter(vals);
        st.n_kept = f.n_kept;
        if (f.n_kept > 0) {
            st.nu = f.mean;
            sum += f.mean;
            ++n_means;
        } else {
            ++est.skipped_steps;
        }
        total_valid += st.n_valid;
        total_kept += st.n_kept;
        est.per_step.push_back(st);
    }
    if (n_means > 0)
        est.nu = sum / n_means;
    est.kept_fraction = total_valid > 0 ? static_cast<double>(total_kept) / static_cast<double>(total_valid) : 0.0;
    return est;
}

double shock_steepness(const DensityTrace& trace)
{
    require_1d(trace, 1);
    const double c = trace.dx / trace.dt;
    const int n = trace.nx;
    double best = 0.0;
    for (const auto& r : trace.rho)
        for (int x = 0; x < n; ++x)
            best = std::max(best, c * std::abs(r[x] - r[(x + 1) % n]));
    return best;
}

std::size_t shock_formation_index(const DensityTrace& trace)
{
    if (trace.size() == 0)
        fail(ErrorCode::InvalidArgument, "trace too short: 0 snapshots, need 1");
    const int nx = trace.nx;
    const int ny = trace.ny;
    std::size_t best_k = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto& r = trace.rho[k];
        double g = 0.0;
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                const double c = r[y * nx + x];
                g = std::max(g, std::abs(r[y * nx + (x + 1) % nx] - c));
                if (ny > 1)
                    g = std::max(g, std::abs(r[((y + 1) % ny) * nx + x] - c));
            }
        }
        g /= trace.dx;
        if (g > best) {
            best = g;
            best_k = k;
        }
    }
    return best_k;
}

AnalyticConfig analytic_config_for(const DensityTrace& trace, double rho_b, double rho_a,
                                   const CollisionParams& params, NuVariant nu_variant, int l_trunc)
{
    PdeCoefficients1D p = predicted_coefficients_1d(params, trace.dx, trace.dt);
    AnalyticConfig cfg;
    cfg.lx = trace.nx * trace.dx;
    cfg.rho_a = rho_a;
    cfg.rho_b = rho_b;
    cfg.c = trace.dx / trace.dt;
    cfg.alpha = params.alpha();
    cfg.nu = nu_variant == NuVariant::Corrected ? p.nu : p.nu_yepez;
    cfg.l_trunc = l_trunc;
    return cfg;
}

std::vector<TimeMetric> mse_compare(const DensityTrace& trace, const AnalyticConfig& cfg)
{
    require_1d(trace, 1);
    const double lx = trace.nx * trace.dx;
    if (std::abs(lx - cfg.lx) > 1e-12 * std::max(1.0, lx))
        fail(ErrorCode::InvalidArgument, "trace grid does not match the analytic domain length");
    ColeHopfSolution sol(cfg);
    std::vector<double> xs(trace.nx);
    for (int i = 0; i < trace.nx; ++i)
        xs[i] = i * trace.dx;

    std::vector<TimeMetric> out;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double t = trace.time(k);
        std::vector<double> ref = sol.density(xs, t);
        double acc = 0.0;
        for (int i = 0; i < trace.nx; ++i) {
            const double d = trace.rho[k][i] - ref[i];
            acc += d * d;
        }
        out.push_back({t, acc / trace.nx});
    }
    return out;
}

std::vector<TimeMetric> l2_compare_2d(const DensityTrace& qlg, const DensityTrace& fdm, double rho_b,
                                      std::optional<long> fdm_diverged_at)
{
    if (qlg.nx != fdm.nx || qlg.ny != fdm.ny)
        fail(ErrorCode::InvalidArgument, "l2_compare_2d: grids differ");
    const std::size_t n = std::min(qlg.size(), fdm.size());
    std::vector<TimeMetric> out;
    for (std::size_t k = 0; k < n; ++k) {
        if (qlg.steps[k] != fdm.steps[k])
            fail(ErrorCode::InvalidArgument, "l2_compare_2d: snapshot steps differ");
        if (fdm_diverged_at && qlg.steps[k] >= *fdm_diverged_at)
            break;
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < qlg.rho[k].size(); ++i) {
            const double d = qlg.rho[k][i] - fdm.rho[k][i];
            const double e = qlg.rho[k][i] - rho_b;
            num += d * d;
            den += e * e;
        }
        TimeMetric m{qlg.time(k), std::nullopt};
        if (den > 0.0)
            m.value = std::sqrt(num / den);
        out.push_back(m);
    }
    return out;
}

CalibrationResult calibrate_viscosity_estimator(std::span<const double> thetas, int nx, double rho_b,
                                                double rho_a, int steps)
{
    if (thetas.empty())
        fail(ErrorCode::InvalidArgument, "calibration needs at least one theta");
    CalibrationResult res;
    bool ok[2] = {true, true};
    bool seen[2] = {false, false};
    for (double theta : thetas) {
        CollisionParams p(theta);
        PdeCoefficients1D k = predicted_coefficients_1d(p, 1.0, 1.0);
        std::vector<double> rho0(nx);
        for (int i = 0; i < nx; ++i)
            rho0[i] = rho_b + rho_a * std::cos(2.0 * std::numbers::pi * i / nx);
        FdmState2D s = make_fdm_state_1d(nx, 1.0, 1.0, k.c_s, k.nu, rho0, rho_b, rho_a);
        DensityTrace trace(nx, 1, 1.0, 1.0);
        trace.append(0, s.rho);
        for (int t = 1; t <= steps; ++t) {
            if (!advance(s))
                fail(ErrorCode::Diverged, "calibration FDM run diverged");
            trace.append(t, s.rho);
        }
        for (ViscosityVariant v : {ViscosityVariant::AsPrinted, ViscosityVariant::PdeConsistent}) {
            ViscosityEstimate e = experimental_viscosity(trace, p, v);
            CalibrationCase c{v, k.nu, e.nu, 0.0, e.kept_fraction};
            c.rel_error = e.nu ? std::abs(*e.nu - k.nu) / k.nu : std::numeric_limits<double>::infinity();
            const int idx = v == ViscosityVariant::AsPrinted ? 0 : 1;
            if (c.kept_fraction >= 0.5) {
                seen[idx] = true;
                if (!(c.rel_error < 0.02))
                    ok[idx] = false;
            }
            res.cases.push_back(c);
        }
    }
    if (ok[1] && seen[1])
        res.selected = ViscosityVariant::PdeConsistent;
    else if (ok[0] && seen[0])
        res.selected = ViscosityVariant::AsPrinted;
    return res;
}

namespace {

// Runs job(i) for i in [0, n) on up to `threads` workers.
template <class Job>
void parallel_for(std::size_t n, int threads, Job job)
{
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
                job(i);
        });
    for (auto& t : pool)
        t.join();
}

std::string describe(const std::exception& e) { return e.what(); }

} // namespace

std::vector<SweepRow> viscosity_sweep(const ViscositySweepConfig& cfg, int threads)
{
    if (cfg.steps < 1)
        fail(ErrorCode::InvalidArgument, "viscosity sweep needs steps >= 1");
    Grid1D grid{cfg.nx, cfg.lx};
    validate(grid);

    std::vector<SweepRow> rows(cfg.thetas.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.theta = cfg.thetas[i];
        row.steps = cfg.steps;
        try {
            CollisionParams p(cfg.thetas[i], cfg.zeta, cfg.xi);
            PdeCoefficients1D k = predicted_coefficients_1d(p, grid.dx(), grid.dt());
            row.nu_pred = k.nu;
            row.nu_yepez = k.nu_yepez;
            PopulationField f = init_cosine_1d(grid, cfg.rho_b, cfg.rho_a, p, cfg.init);
            DensityTrace trace(grid.nx, 1, grid.dx(), grid.dt());
            trace.append(0, density(f));
            for (int t = 1; t <= cfg.steps; ++t) {
                step_inplace(f, p, cfg.step_options);
                trace.append(f.step, density(f));
            }
            ViscosityEstimate e = experimental_viscosity(trace, p, cfg.variant);
            row.nu_exp = e.nu;
            row.kept_fraction = e.kept_fraction;
            if (!e.nu)
                row.error = "no estimate";
        } catch (const std::exception& e) {
            row.error = describe(e);
        }
    });
    return rows;
}

std::vector<SteepnessRow> steepness_sweep(const SteepnessSweepConfig& cfg, int threads)
{
    if (cfg.horizons.empty() || cfg.nxs.empty())
        fail(ErrorCode::InvalidArgument, "steepness sweep needs at least one nx and one horizon");
    std::vector<int> horizons = cfg.horizons;
    std::sort(horizons.begin(), horizons.end());
    if (horizons.front() < 0)
        fail(ErrorCode::InvalidArgument, "steepness horizons must be non-negative");

    const std::size_t n_theta = cfg.thetas.size();
    const std::size_t n_h = cfg.horizons.size();
    std::vector<SteepnessRow> rows(cfg.nxs.size() * n_theta * n_h);
    parallel_for(cfg.nxs.size() * n_theta, threads, [&](std::size_t job) {
        const std::size_t g = job / n_theta;
        const std::size_t ti = job % n_theta;
        const int nx = cfg.nxs[g];
        const double theta = cfg.thetas[ti];
        SteepnessRow* out = &rows[job * n_h];
        for (std::size_t h = 0; h < n_h; ++h)
            out[h] = {theta, nx, cfg.horizons[h], 0.0, {}};
        try {
            Grid1D grid{nx, cfg.lx > 0.0 ? cfg.lx : static_cast<double>(nx)};
            validate(grid);
            CollisionParams p(theta, cfg.zeta, cfg.xi);
            PopulationField f = init_cosine_1d(grid, cfg.rho_b, cfg.rho_a, p, cfg.init);
            const double c = grid.dx() / grid.dt();
            auto jump = [&](const PopulationField& field) {
                std::vector<double> r = density(field);
                double best = 0.0;
                for (int x = 0; x < nx; ++x)
                    best = std::max(best, c * std::abs(r[x] - r[(x + 1) % nx]));
                return best;
            };
            double running = jump(f);
            int done = 0;
            for (int target : horizons) {
                for (; done < target; ++done) {
                    step_inplace(f, p, cfg.step_options);
                    running = std::max(running, jump(f));
                }
                for (std::size_t h = 0; h < n_h; ++h)
                    if (cfg.horizons[h] == target)
                        out[h].delta = running;
            }
        } catch (const std::exception& e) {
            for (std::size_t h = 0; h < n_h; ++h)
                out[h].error = describe(e);
        }
    });
    return rows;
}

} // namespace qlg
