#pragma once

// CSV artifacts. Floats are written with 17 significant digits so a file
// read back reproduces the doubles exactly.

#include "qlg/experiments.hpp"
#include "qlg/lattice.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qlg {

/// "{run_id}_t{step}.csv"
std::string snapshot_filename(const std::string& run_id, long step);

/// Header t,x,rho,u,f0,f1 (t,x,y,... in 2D). x and y are index * dx.
void write_lattice_snapshot(const std::filesystem::path& path, const PopulationField& field);

/// Header t,x,rho (t,x,y,rho in 2D).
void write_density_snapshot(const std::filesystem::path& path, double t, int nx, int ny, double dx,
                            std::span<const double> rho);

struct DensitySnapshot {
    double t = 0.0;
    int nx = 0;
    int ny = 1;
    double dx = 1.0;
    std::vector<double> rho;
};

/// Reads any of the snapshot formats above. Grid size comes from the distinct
/// x (and y) values; rows must be in the order the writers use.
DensitySnapshot read_density_snapshot(const std::filesystem::path& path);

/// theta,nu_pred,nu_yepez,nu_exp,kept_fraction,T  (missing estimates as nan)
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

/// theta,nx,T,delta
void write_steepness_csv(const std::filesystem::path& path, std::span<const SteepnessRow> rows);

/// t,metric  (undefined values as nan)
void write_metric_csv(const std::filesystem::path& path, std::span<const TimeMetric> rows);

std::string format_double(double v);

} // namespace qlg
