#ifndef STARFLOW_CONFIG_HPP
#define STARFLOW_CONFIG_HPP

#include <filesystem>
#include <string>

#include "starflow/flow.hpp"
#include "starflow/prescribed.hpp"
#include "starflow/sphere_grid.hpp"
#include "starflow/symfunc.hpp"

namespace starflow {

/// One complete run description, parsed from a flat "section.key = value"
/// text file (blank lines and '#' comments ignored).
struct RunConfig {
    // grid
    GridMode grid_mode = GridMode::Full;
    int n_theta = 64;
    int n_phi = 128;

    // curvature function
    std::string curvature_kind = "sigma";  // sigma | inv_sigma
    int curvature_k = 1;
    double curvature_alpha = 1.0;

    // prescribed function
    double prescribed_p = 2.0;
    double prescribed_epsilon = 0.0;
    Vec3 prescribed_c{0.0, 0.0, 1.0};

    // barrier radii
    double r1 = 0.8;
    double r2 = 1.0;

    // initial surface
    std::string initial_kind = "constant";  // constant | perturbed | file
    double initial_radius = 0.8;
    double initial_amplitude = 0.0;         // perturbed: rho0 = c (1 + a Y)
    Vec3 initial_c{0.0, 0.0, 1.0};
    std::string initial_file;

    // flow
    FlowConfig flow;

    // outputs
    std::string output_dir = "out";

    CurvatureSpec curvature_spec() const;
    PrescribedSpec prescribed_spec() const;
    SphereGrid build_grid() const;
    NodeField initial_field(const SphereGrid& grid) const;  // returns rho_0
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace starflow

#endif
