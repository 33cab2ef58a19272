#pragma once

#include <filesystem>
#include <string>

#include "nlsvc/diagnostics.hpp"
#include "nlsvc/grid.hpp"
#include "nlsvc/propagators.hpp"
#include "nlsvc/virial.hpp"

namespace nlsvc {

/// CSV writers. Numbers use %.17g so output is reproducible bit for bit.
/// Each throws std::runtime_error when the file cannot be written.

/// Columns x,re,im.
void write_grid_function_csv(const std::filesystem::path& path, const GridFunction& u);
/// Columns t,x,re,im, one block per recorded time.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
/// Columns t,mass,quadratic,potential,energy,full_energy.
void write_ledger_csv(const std::filesystem::path& path, const Trajectory& traj);
/// Columns t,value.
void write_series_csv(const std::filesystem::path& path, const Series& s);
/// Columns t,theta,theta_prime,theta_second,Z,Z_loc.
void write_virial_csv(const std::filesystem::path& path, const VirialSeries& s);

std::string format_number(double v);

}  // namespace nlsvc
