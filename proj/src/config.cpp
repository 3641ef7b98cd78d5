#include "starflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "starflow/errors.hpp"
#include "starflow/io.hpp"

namespace starflow {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw DomainError("config: bad numeric value for " + key + ": '" + value + "'");
    }
}

int to_int(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw DomainError("config: expected integer for " + key + ", got '" + value + "'");
    }
    return i;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DomainError("config: line " + std::to_string(line_no) +
                              " is not 'key = value': '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "grid.mode") {
            if (value == "full") {
                cfg.grid_mode = GridMode::Full;
            } else if (value == "axisymmetric") {
                cfg.grid_mode = GridMode::Axisymmetric;
            } else {
                throw DomainError("config: grid.mode must be full or axisymmetric");
            }
        } else if (key == "grid.n_theta") {
            cfg.n_theta = to_int(key, value);
        } else if (key == "grid.n_phi") {
            cfg.n_phi = to_int(key, value);
        } else if (key == "curvature.kind") {
            if (value != "sigma" && value != "inv_sigma") {
                throw DomainError("config: curvature.kind must be sigma or inv_sigma");
            }
            cfg.curvature_kind = value;
        } else if (key == "curvature.k") {
            cfg.curvature_k = to_int(key, value);
        } else if (key == "curvature.alpha") {
            cfg.curvature_alpha = to_double(key, value);
        } else if (key == "prescribed.p") {
            cfg.prescribed_p = to_double(key, value);
        } else if (key == "prescribed.epsilon") {
            cfg.prescribed_epsilon = to_double(key, value);
        } else if (key == "prescribed.c1") {
            cfg.prescribed_c.x = to_double(key, value);
        } else if (key == "prescribed.c2") {
            cfg.prescribed_c.y = to_double(key, value);
        } else if (key == "prescribed.c3") {
            cfg.prescribed_c.z = to_double(key, value);
        } else if (key == "radii.r1") {
            cfg.r1 = to_double(key, value);
        } else if (key == "radii.r2") {
            cfg.r2 = to_double(key, value);
        } else if (key == "initial.kind") {
            if (value != "constant" && value != "perturbed" && value != "file") {
                throw DomainError("config: initial.kind must be constant, perturbed or file");
            }
            cfg.initial_kind = value;
        } else if (key == "initial.radius") {
            cfg.initial_radius = to_double(key, value);
        } else if (key == "initial.amplitude") {
            cfg.initial_amplitude = to_double(key, value);
        } else if (key == "initial.c1") {
            cfg.initial_c.x = to_double(key, value);
        } else if (key == "initial.c2") {
            cfg.initial_c.y = to_double(key, value);
        } else if (key == "initial.c3") {
            cfg.initial_c.z = to_double(key, value);
        } else if (key == "initial.file") {
            cfg.initial_file = value;
        } else if (key == "flow.safety") {
            cfg.flow.safety = to_double(key, value);
        } else if (key == "flow.integrator") {
            if (value == "euler") {
                cfg.flow.integrator = Integrator::Euler;
            } else if (value == "rk2") {
                cfg.flow.integrator = Integrator::RK2;
            } else if (value == "rk4") {
                cfg.flow.integrator = Integrator::RK4;
            } else {
                throw DomainError("config: flow.integrator must be euler, rk2 or rk4");
            }
        } else if (key == "flow.tol_residual") {
            cfg.flow.tol_residual = to_double(key, value);
        } else if (key == "flow.t_max") {
            cfg.flow.t_max = to_double(key, value);
        } else if (key == "flow.max_steps") {
            cfg.flow.max_steps = static_cast<long long>(to_double(key, value));
        } else if (key == "flow.monitor_stride") {
            cfg.flow.monitor_stride = to_int(key, value);
        } else if (key == "output.dir") {
            cfg.output_dir = value;
        } else {
            throw DomainError("config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("config: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

CurvatureSpec RunConfig::curvature_spec() const {
    return curvature_kind == "sigma" ? sigma_k(curvature_k, curvature_alpha)
                                     : inv_sigma_k(curvature_k, curvature_alpha);
}

PrescribedSpec RunConfig::prescribed_spec() const {
    PrescribedSpec spec;
    spec.p = prescribed_p;
    spec.epsilon = prescribed_epsilon;
    spec.harmonic = prescribed_c;
    return spec;
}

SphereGrid RunConfig::build_grid() const {
    return SphereGrid::build(grid_mode, n_theta, n_phi);
}

NodeField RunConfig::initial_field(const SphereGrid& grid) const {
    if (initial_kind == "constant") {
        if (!(initial_radius > 0.0)) {
            throw DomainError("config: initial.radius must be positive");
        }
        return grid.constant_field(initial_radius);
    }
    if (initial_kind == "perturbed") {
        NodeField rho(grid.node_count());
        for (std::size_t i = 0; i < rho.size(); ++i) {
            const double y = dot(initial_c, grid.unit_vector(i));
            rho[i] = initial_radius * (1.0 + initial_amplitude * y);
            if (!(rho[i] > 0.0)) {
                throw DomainError("config: perturbed initial surface has nonpositive radius");
            }
        }
        return rho;
    }
    // file
    const FieldFile f = read_field_file(initial_file);
    if (f.mode != grid.mode() || f.n_theta != grid.n_theta() ||
        (f.mode == GridMode::Full && f.n_phi != grid.n_phi())) {
        throw DomainError("config: field file grid does not match configured grid");
    }
    return f.values;
}

}  // namespace starflow
