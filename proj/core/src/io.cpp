#include "nlsvc/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nlsvc {

namespace {

std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void row(std::ofstream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_number(v);
    first = false;
  }
  out << '\n';
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_grid_function_csv(const std::filesystem::path& path, const GridFunction& u) {
  auto out = open(path);
  out << "x,re,im\n";
  for (std::size_t j = 0; j < u.size(); ++j) row(out, {u.grid().x(j), u[j].real(), u[j].imag()});
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open(path);
  out << "t,x,re,im\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const GridFunction& u = traj.states[k];
    for (std::size_t j = 0; j < u.size(); ++j) row(out, {traj.times[k], u.grid().x(j), u[j].real(), u[j].imag()});
  }
}

void write_ledger_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open(path);
  out << "t,mass,quadratic,potential,energy,full_energy\n";
  for (std::size_t k = 0; k < traj.ledgers.size(); ++k) {
    const EnergyLedger& l = traj.ledgers[k];
    row(out, {traj.times[k], l.mass, l.quadratic, l.potential, l.energy, l.full_energy});
  }
}

void write_series_csv(const std::filesystem::path& path, const Series& s) {
  auto out = open(path);
  out << "t,value\n";
  for (std::size_t k = 0; k < s.t.size(); ++k) row(out, {s.t[k], s.value[k]});
}

void write_virial_csv(const std::filesystem::path& path, const VirialSeries& s) {
  auto out = open(path);
  out << "t,theta,theta_prime,theta_second,Z,Z_loc\n";
  for (std::size_t k = 0; k < s.size(); ++k)
    row(out, {s.t[k], s.theta[k], s.theta_prime[k], s.theta_second[k], s.Z[k], s.Z_loc[k]});
}

}  // namespace nlsvc
