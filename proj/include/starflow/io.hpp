#ifndef STARFLOW_IO_HPP
#define STARFLOW_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "starflow/flow.hpp"
#include "starflow/monitors.hpp"
#include "starflow/prescribed.hpp"
#include "starflow/sphere_grid.hpp"

namespace starflow {

/// Shortest round-trip decimal representation of a double; stable for a
/// given build, used everywhere a number reaches a file.
std::string format_double(double v);

/// Write-temp-then-rename so partially written outputs are never observed.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Time-series CSV with the fixed column set
/// t,max_dt_rho,min_rho,max_rho,max_grad_rho,min_kappa,max_kappa,residual,
/// min_F,cone_margin,max_H.
std::string series_csv(const MonitorSeries& series);

/// Certificates plus run summary as JSON: one object per proposition with
/// {pass, constants, worst_margin, worst_time}.
std::string certificates_json(const std::vector<Certificate>& certs,
                              const FlowReport& report, double final_residual);

/// Wavefront OBJ of the surface rho * x: one vertex per grid node, quad cells
/// split into two triangles, phi seam closed. Axisymmetric profiles are swept
/// with n_phi azimuthal copies.
std::string mesh_obj(const SphereGrid& grid, const NodeField& rho, int sweep_n_phi = 64);

/// Radius field file: a small text header followed by one value per node.
std::string field_file(const SphereGrid& grid, const NodeField& rho);

struct FieldFile {
    GridMode mode = GridMode::Full;
    int n_theta = 0;
    int n_phi = 0;
    NodeField values;
};

FieldFile read_field_file(const std::filesystem::path& path);

}  // namespace starflow

#endif
