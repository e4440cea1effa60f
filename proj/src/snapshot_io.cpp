#include "qlg/snapshot_io.hpp"

#include "qlg/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace qlg {

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string snapshot_filename(const std::string& run_id, long step)
{
    return run_id + "_t" + std::to_string(step) + ".csv";
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_for_write(const std::filesystem::path& path)
{
    File f(std::fopen(path.c_str(), "w"));
    if (!f)
        fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    return f;
}

void finish(File& f, const std::filesystem::path& path)
{
    if (std::ferror(f.get()) || std::fclose(f.release()) != 0)
        fail(ErrorCode::Io, "write to " + path.string() + " failed");
}

void put(std::FILE* f, double v, char sep)
{
    std::fputs(format_double(v).c_str(), f);
    std::fputc(sep, f);
}

} // namespace

void write_lattice_snapshot(const std::filesystem::path& path, const PopulationField& field)
{
    File f = open_for_write(path);
    const bool two_d = field.ny > 1;
    std::fputs(two_d ? "t,x,y,rho,u,f0,f1\n" : "t,x,rho,u,f0,f1\n", f.get());
    const double t = field.time();
    for (int y = 0; y < field.ny; ++y)
        for (int x = 0; x < field.nx; ++x) {
            const std::size_t k = field.index(x, y);
            const double f0 = field.f0[k];
            const double f1 = field.f1[k];
            put(f.get(), t, ',');
            put(f.get(), x * field.dx, ',');
            if (two_d)
                put(f.get(), y * field.dx, ',');
            put(f.get(), f0 + f1, ',');
            put(f.get(), f1 - f0, ',');
            put(f.get(), f0, ',');
            put(f.get(), f1, '\n');
        }
    finish(f, path);
}

void write_density_snapshot(const std::filesystem::path& path, double t, int nx, int ny, double dx,
                            std::span<const double> rho)
{
    if (rho.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
        fail(ErrorCode::InvalidArgument, "snapshot size does not match nx * ny");
    File f = open_for_write(path);
    const bool two_d = ny > 1;
    std::fputs(two_d ? "t,x,y,rho\n" : "t,x,rho\n", f.get());
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            put(f.get(), t, ',');
            put(f.get(), x * dx, ',');
            if (two_d)
                put(f.get(), y * dx, ',');
            put(f.get(), rho[static_cast<std::size_t>(y) * nx + x], '\n');
        }
    finish(f, path);
}

DensitySnapshot read_density_snapshot(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::Io, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        fail(ErrorCode::Io, path.string() + ": empty file");

    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ','))
            cols.push_back(c);
    }
    auto find = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name)
                return static_cast<int>(i);
        return -1;
    };
    const int it = find("t");
    const int ix = find("x");
    const int iy = find("y");
    const int ir = find("rho");
    if (it < 0 || ix < 0 || ir < 0)
        fail(ErrorCode::Io, path.string() + ": header needs t, x and rho columns");

    DensitySnapshot snap;
    std::set<double> xs;
    std::set<double> ys;
    std::vector<double> vals;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty())
            continue;
        vals.clear();
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            double v = std::strtod(p, &end);
            if (end == p)
                fail(ErrorCode::Io, path.string() + ": bad number on line " + std::to_string(row));
            vals.push_back(v);
            if (*end == '\0')
                break;
            if (*end != ',')
                fail(ErrorCode::Io, path.string() + ": bad separator on line " + std::to_string(row));
            p = end + 1;
        }
        if (vals.size() != cols.size())
            fail(ErrorCode::Io, path.string() + ": wrong column count on line " + std::to_string(row));
        snap.t = vals[it];
        xs.insert(vals[ix]);
        if (iy >= 0)
            ys.insert(vals[iy]);
        snap.rho.push_back(vals[ir]);
    }
    snap.nx = static_cast<int>(xs.size());
    snap.ny = iy >= 0 ? static_cast<int>(ys.size()) : 1;
    if (snap.nx == 0 || snap.rho.size() != static_cast<std::size_t>(snap.nx) * snap.ny)
        fail(ErrorCode::Io, path.string() + ": rows do not form a full grid");
    snap.dx = snap.nx > 1 ? *std::next(xs.begin()) - *xs.begin() : 1.0;
    return snap;
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows)
{
    File f = open_for_write(path);
    std::fputs("theta,nu_pred,nu_yepez,nu_exp,kept_fraction,T\n", f.get());
    for (const auto& r : rows) {
        put(f.get(), r.theta, ',');
        put(f.get(), r.nu_pred, ',');
        put(f.get(), r.nu_yepez, ',');
        put(f.get(), r.nu_exp ? *r.nu_exp : std::nan(""), ',');
        put(f.get(), r.kept_fraction, ',');
        std::fprintf(f.get(), "%d\n", r.steps);
    }
    finish(f, path);
}

void write_steepness_csv(const std::filesystem::path& path, std::span<const SteepnessRow> rows)
{
    File f = open_for_write(path);
    std::fputs("theta,nx,T,delta\n", f.get());
    for (const auto& r : rows) {
        put(f.get(), r.theta, ',');
        std::fprintf(f.get(), "%d,%d,", r.nx, r.steps);
        put(f.get(), r.error.empty() ? r.delta : std::nan(""), '\n');
    }
    finish(f, path);
}

void write_metric_csv(const std::filesystem::path& path, std::span<const TimeMetric> rows)
{
    File f = open_for_write(path);
    std::fputs("t,metric\n", f.get());
    for (const auto& r : rows) {
        put(f.get(), r.t, ',');
        put(f.get(), r.value ? *r.value : std::nan(""), '\n');
    }
    finish(f, path);
}

} // namespace qlg
