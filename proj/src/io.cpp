#include "starflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "starflow/errors.hpp"

namespace starflow {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("atomic_write: cannot open " + tmp.string());
        out << content;
        if (!out.good()) throw Error("atomic_write: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string series_csv(const MonitorSeries& series) {
    std::string out =
        "t,max_dt_rho,min_rho,max_rho,max_grad_rho,min_kappa,max_kappa,residual,"
        "min_F,cone_margin,max_H\n";
    for (const auto& s : series.samples) {
        out += format_double(s.t);
        out += ',';
        out += format_double(s.max_abs_dt_rho);
        out += ',';
        out += format_double(s.min_rho);
        out += ',';
        out += format_double(s.max_rho);
        out += ',';
        out += format_double(s.max_grad_rho);
        out += ',';
        out += format_double(s.min_kappa);
        out += ',';
        out += format_double(s.max_kappa);
        out += ',';
        out += format_double(s.residual);
        out += ',';
        out += format_double(s.min_F);
        out += ',';
        out += format_double(s.cone_margin);
        out += ',';
        out += format_double(s.max_H);
        out += '\n';
    }
    return out;
}

std::string certificates_json(const std::vector<Certificate>& certs,
                              const FlowReport& report, double final_residual) {
    nlohmann::ordered_json root;
    root["termination"] = termination_name(report.termination);
    root["final_time"] = report.final_state.t;
    root["steps"] = report.final_state.step;
    root["final_residual"] = final_residual;
    root["all_pass"] = true;
    for (const auto& c : certs) {
        nlohmann::ordered_json entry;
        entry["pass"] = c.pass;
        nlohmann::ordered_json constants;
        for (const auto& [key, value] : c.constants) constants[key] = value;
        entry["constants"] = constants;
        entry["worst_margin"] = c.worst_margin;
        entry["worst_time"] = c.worst_time;
        root["certificates"][c.name] = entry;
        if (!c.pass) root["all_pass"] = false;
    }
    return root.dump(2) + "\n";
}

std::string mesh_obj(const SphereGrid& grid, const NodeField& rho, int sweep_n_phi) {
    std::ostringstream out;
    out << "# starflow surface mesh\n";

    const int nt = grid.n_theta();
    const int np = grid.is_axisymmetric() ? sweep_n_phi : grid.n_phi();
    const double dphi = 2.0 * std::numbers::pi / np;

    for (int j = 0; j < nt; ++j) {
        for (int i = 0; i < np; ++i) {
            double r, th, ph;
            if (grid.is_axisymmetric()) {
                r = rho[static_cast<std::size_t>(j)];
                th = grid.theta(static_cast<std::size_t>(j));
                ph = i * dphi;
            } else {
                const std::size_t idx = grid.index(j, i);
                r = rho[idx];
                th = grid.theta(idx);
                ph = grid.phi(idx);
            }
            out << "v " << format_double(r * std::sin(th) * std::cos(ph)) << ' '
                << format_double(r * std::sin(th) * std::sin(ph)) << ' '
                << format_double(r * std::cos(th)) << '\n';
        }
    }

    // quads between latitude rows, phi seam wrapped, each split in two
    const auto vid = [np](int j, int i) { return j * np + (i % np) + 1; };
    for (int j = 0; j + 1 < nt; ++j) {
        for (int i = 0; i < np; ++i) {
            const int a = vid(j, i), b = vid(j, i + 1);
            const int c = vid(j + 1, i + 1), d = vid(j + 1, i);
            out << "f " << a << ' ' << b << ' ' << c << '\n';
            out << "f " << a << ' ' << c << ' ' << d << '\n';
        }
    }
    return out.str();
}

std::string field_file(const SphereGrid& grid, const NodeField& rho) {
    std::string out = "# starflow radius field\n";
    out += (grid.is_axisymmetric() ? std::string("axisymmetric") : std::string("full"));
    out += ' ';
    out += std::to_string(grid.n_theta());
    out += ' ';
    out += std::to_string(grid.n_phi());
    out += '\n';
    for (const double v : rho) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

FieldFile read_field_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_field_file: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("# starflow radius field", 0) != 0) {
        throw Error("read_field_file: bad header in " + path.string());
    }
    FieldFile f;
    std::string mode;
    if (!(in >> mode >> f.n_theta >> f.n_phi)) {
        throw Error("read_field_file: bad shape line in " + path.string());
    }
    if (mode == "full") {
        f.mode = GridMode::Full;
    } else if (mode == "axisymmetric") {
        f.mode = GridMode::Axisymmetric;
    } else {
        throw Error("read_field_file: unknown mode '" + mode + "'");
    }
    const std::size_t expected = static_cast<std::size_t>(f.n_theta) *
                                 (f.mode == GridMode::Full ? f.n_phi : 1);
    double v;
    while (in >> v) f.values.push_back(v);
    if (f.values.size() != expected) {
        throw Error("read_field_file: expected " + std::to_string(expected) +
                    " values, got " + std::to_string(f.values.size()));
    }
    return f;
}

}  // namespace starflow
