#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "starflow/config.hpp"
#include "starflow/errors.hpp"
#include "starflow/flow.hpp"
#include "starflow/io.hpp"
#include "starflow/monitors.hpp"
#include "starflow/prescribed.hpp"
#include "starflow/shape.hpp"
#include "starflow/sphere_grid.hpp"
#include "starflow/symfunc.hpp"

namespace {

using namespace starflow;

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitConeViolation = 3;
constexpr int kExitNoConvergence = 4;

void print_admissibility(const AdmissibilityReport& report) {
    std::cout << "prescribed-function admissibility on [" << report.r1 << ", " << report.r2
              << "]\n"
              << "  min d/drho(rho^-k f) : " << report.min_mono << "\n"
              << "  inner barrier margin : " << report.barriers.inner_margin << "\n"
              << "  outer barrier margin : " << report.barriers.outer_margin << "\n"
              << "  delta0               : " << report.delta0 << "\n"
              << "  sup |grad f|         : " << report.c0_grad << "\n"
              << "  C2 norm              : " << report.c2_norm << "\n"
              << "  verdict              : " << (report.pass() ? "pass" : "FAIL") << "\n";
}

void print_initial_check(const InitialCheck& check) {
    std::cout << "initial-data check (degree " << check.degree << " branch)\n";
    if (check.degree <= 1.0) {
        std::cout << "  min F[rho0] : " << check.lhs_min << "  (needs >= 0)\n"
                  << "  max F[rho0] : " << check.lhs_max << "\n";
    } else {
        std::cout << "  min LHS : " << check.lhs_min << "  (needs >= 0)\n"
                  << "  max LHS : " << check.lhs_max << "  (needs <= RHS)\n"
                  << "  RHS     : " << check.rhs << "\n"
                  << "  " << check.norm_note << "\n";
    }
    std::cout << "  verdict : " << (check.pass ? "pass" : "FAIL") << "\n";
}

int cmd_check_f(const RunConfig& cfg) {
    const SphereGrid grid = cfg.build_grid();
    const auto report = admissibility_report(cfg.prescribed_spec(),
                                             cfg.curvature_spec().degree(), cfg.r1, cfg.r2,
                                             grid);
    print_admissibility(report);
    return report.pass() ? 0 : kExitFail;
}

int cmd_check_init(const RunConfig& cfg) {
    const SphereGrid grid = cfg.build_grid();
    const NodeField rho0 = cfg.initial_field(grid);
    NodeField u0(rho0.size());
    std::transform(rho0.begin(), rho0.end(), u0.begin(),
                   [](double r) { return std::log(r); });
    const auto check = check_initial(grid, u0, cfg.curvature_spec(), cfg.prescribed_spec(),
                                     cfg.r1, cfg.r2);
    print_initial_check(check);
    return check.pass ? 0 : kExitFail;
}

int cmd_solve(const RunConfig& cfg, bool force, const std::vector<double>& snapshot_times,
              const std::string& out_override) {
    const SphereGrid grid = cfg.build_grid();
    const CurvatureSpec F_spec = cfg.curvature_spec();
    const PrescribedSpec f_spec = cfg.prescribed_spec();
    const NodeField rho0 = cfg.initial_field(grid);
    NodeField u0(rho0.size());
    std::transform(rho0.begin(), rho0.end(), u0.begin(),
                   [](double r) { return std::log(r); });

    const auto f_report = admissibility_report(f_spec, F_spec.degree(), cfg.r1, cfg.r2, grid);
    print_admissibility(f_report);
    bool checks_pass = f_report.pass();
    try {
        const auto init_check = check_initial(grid, u0, F_spec, f_spec, cfg.r1, cfg.r2);
        print_initial_check(init_check);
        checks_pass = checks_pass && init_check.pass;
    } catch (const ConeError& e) {
        std::cout << "initial-data check: inadmissible (" << e.what() << ")\n";
        checks_pass = false;
    }
    if (!checks_pass) {
        if (!force) {
            std::cerr << "pre-run checks failed (use --force to run anyway)\n";
            return kExitConfig;
        }
        std::cout << "pre-run checks failed, continuing under --force\n";
    }

    FlowConfig flow_cfg = cfg.flow;
    flow_cfg.store_fields = !snapshot_times.empty();
    const FlowReport report = evolve(grid, u0, F_spec, f_spec, flow_cfg);
    std::cout << "flow terminated: " << termination_name(report.termination) << " at t = "
              << report.final_state.t << " after " << report.final_state.step << " steps ("
              << report.wall_seconds << " s)\n";

    const std::filesystem::path out_dir = out_override.empty() ? cfg.output_dir : out_override;
    std::filesystem::create_directories(out_dir);
    atomic_write(out_dir / "series.csv", series_csv(report.series));

    const NodeField rho_final = [&] {
        NodeField r(report.final_state.u.size());
        std::transform(report.final_state.u.begin(), report.final_state.u.end(), r.begin(),
                       [](double u) { return std::exp(u); });
        return r;
    }();
    atomic_write(out_dir / "final_field.txt", field_file(grid, rho_final));

    if (report.termination == Termination::ConeViolation) {
        // post-mortem dump: the offending state and what happened
        std::string dump = "cone violation\n";
        if (report.cone_violation) {
            dump += report.cone_violation->message + "\n";
        }
        atomic_write(out_dir / "postmortem.txt", dump + field_file(grid, rho_final));
        std::cerr << "cone violation: "
                  << (report.cone_violation ? report.cone_violation->message : "") << "\n";
        return kExitConeViolation;
    }

    // certificates with constants recomputed from the actual run
    const double R1 = std::min(cfg.r1, report.series.meta.min_rho0);
    const double R2 = std::max(cfg.r2, report.series.meta.max_rho0);
    const double d0 = delta0(f_spec, F_spec.degree(), R1, R2, grid);
    const FNorms f_norms = norms(f_spec, R1, R2, grid);
    const ShapeState shape0 = shape_state(grid, rho0);
    const ShapeState shape_final = shape_state(grid, rho_final);

    std::vector<Certificate> certs;
    certs.push_back(cert_bounds(report.series, cfg.r1, cfg.r2));
    certs.push_back(cert_decay(report.series, d0, R1, R2, F_spec.degree(),
                               report.series.meta.F0max));
    certs.push_back(cert_gradient(report.series, f_norms.c0_grad, R2, d0,
                                  report.series.meta.H0max));
    certs.push_back(cert_curvature(report.series, shape0, f_norms, d0, R2));

    const double final_residual = residual(grid, rho_final, shape_final, F_spec, f_spec);
    atomic_write(out_dir / "certificates.json",
                 certificates_json(certs, report, final_residual));

    bool all_pass = true;
    for (const auto& c : certs) {
        std::cout << "certificate " << c.name << ": " << (c.pass ? "pass" : "FAIL")
                  << " (worst margin " << c.worst_margin << " at t = " << c.worst_time
                  << ")\n";
        all_pass = all_pass && c.pass;
    }
    std::cout << "final residual max|1/F - f| = " << final_residual << "\n";

    // mesh exports: final surface, plus the stored snapshots nearest to any
    // requested times
    atomic_write(out_dir / "mesh_final.obj", mesh_obj(grid, rho_final));
    for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
        const double target = snapshot_times[k];
        const Snapshot* best = nullptr;
        for (const auto& snap : report.snapshots) {
            if (!best || std::abs(snap.t - target) < std::abs(best->t - target)) {
                best = &snap;
            }
        }
        if (!best) continue;
        NodeField r(best->u.size());
        std::transform(best->u.begin(), best->u.end(), r.begin(),
                       [](double u) { return std::exp(u); });
        atomic_write(out_dir / ("mesh_t" + std::to_string(k) + ".obj"), mesh_obj(grid, r));
    }

    if (report.termination != Termination::Converged) return kExitNoConvergence;
    return all_pass ? 0 : kExitFail;
}

int cmd_export(const RunConfig& cfg, const std::string& out_override) {
    const SphereGrid grid = cfg.build_grid();
    const NodeField rho = cfg.initial_field(grid);
    const std::filesystem::path out_dir = out_override.empty() ? cfg.output_dir : out_override;
    std::filesystem::create_directories(out_dir);
    atomic_write(out_dir / "mesh.obj", mesh_obj(grid, rho));
    atomic_write(out_dir / "field.txt", field_file(grid, rho));
    std::cout << "wrote " << (out_dir / "mesh.obj").string() << " and "
              << (out_dir / "field.txt").string() << "\n";
    return 0;
}

bool expect(const char* label, bool ok) {
    std::cout << (ok ? "  [ok]   " : "  [FAIL] ") << label << "\n";
    return ok;
}

// Small-size invariant suite across all modules; the CLI-facing counterpart
// of the unit tests.
int cmd_selftest(bool mutate_hessian) {
    if (mutate_hessian) test_hooks::hessian_stencil_perturbation = 0.05;
    bool ok = true;

    // grid operators
    {
        const SphereGrid grid = SphereGrid::build(GridMode::Full, 32, 64);
        NodeField c = grid.constant_field(3.5);
        const auto gc = covariant_gradient(grid, c);
        const auto hc = covariant_hessian(grid, c);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            worst = std::max({worst, std::abs(gc.t[i]), std::abs(gc.p[i]),
                              std::abs(hc.tt[i]), std::abs(hc.tp[i]), std::abs(hc.pp[i])});
        }
        ok &= expect("constant fields have zero gradient and Hessian", worst <= 1e-12);

        NodeField u(grid.node_count());
        double worst_h = 0.0;
        for (std::size_t i = 0; i < grid.node_count(); ++i) u[i] = std::cos(grid.theta(i));
        const auto h = covariant_hessian(grid, u);
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            const double expected = -std::cos(grid.theta(i));
            worst_h = std::max({worst_h, std::abs(h.tt[i] - expected),
                                std::abs(h.pp[i] - expected), std::abs(h.tp[i])});
        }
        ok &= expect("Hessian of cos(theta) is -cos(theta) I", worst_h <= 5e-3);
    }

    // curvature functions
    for (const auto& spec : {sigma_k(1), sigma_k(2), inv_sigma_k(1), sigma_k(1, 2.0)}) {
        const auto report = check_structure(spec, 500, 20240901);
        ok &= expect(("structure conditions for " + spec.name()).c_str(), report.pass());
    }

    // shape on the round sphere
    {
        const SphereGrid grid = SphereGrid::build(GridMode::Full, 16, 32);
        const ShapeState st = shape_state(grid, grid.constant_field(2.0), true);
        double worst = 0.0;
        for (const auto& p : st.pt) {
            worst = std::max({worst, std::abs(p.kappa.first - 0.5),
                              std::abs(p.kappa.second - 0.5), std::abs(p.support - 2.0)});
        }
        ok &= expect("round sphere has kappa = 1/r and support = r", worst <= 1e-12);
    }

    // prescribed-function scans
    {
        const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 64, 0);
        PrescribedSpec f;
        f.p = 2.0;
        const auto report = admissibility_report(f, 1.0, 0.8, 1.0, grid);
        ok &= expect("f = |X|^2 admissible for degree 1 on [0.8, 1]", report.pass());
        ok &= expect("delta0 scan matches closed form 0.64",
                     std::abs(report.delta0 - 0.64) <= 1e-12);
    }

    // sphere relaxation against the logistic limit
    {
        const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 64, 0);
        PrescribedSpec f;
        f.p = 2.0;
        FlowConfig fc;
        fc.tol_residual = 1e-8;
        fc.t_max = 40.0;
        const FlowReport report =
            evolve(grid, grid.constant_field(std::log(0.8)), sigma_k(1), f, fc);
        double dev = 0.0;
        for (const double u : report.final_state.u) {
            dev = std::max(dev, std::abs(std::exp(u) - 1.0));
        }
        ok &= expect("sphere relaxation converges to the unit sphere",
                     report.converged() && dev <= 1e-6);
    }

    std::cout << (ok ? "selftest: all checks passed\n" : "selftest: FAILURES\n");
    return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"starflow: curvature flow of starshaped surfaces toward prescribed "
                 "curvature"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string snapshot_spec;
    bool force = false;
    bool mutate_hessian = false;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file")->required();
        cmd->add_option("--out", out_dir, "output directory override");
    };

    CLI::App* check_f = app.add_subcommand("check-f", "verify prescribed-function conditions");
    add_config(check_f);
    CLI::App* check_init = app.add_subcommand("check-init", "verify initial-data conditions");
    add_config(check_init);
    CLI::App* solve = app.add_subcommand("solve", "run the flow and certify the estimates");
    add_config(solve);
    solve->add_flag("--force", force, "run even if pre-checks fail");
    solve->add_option("--snapshot-times", snapshot_spec,
                      "comma-separated times for OBJ snapshots");
    CLI::App* selftest = app.add_subcommand("selftest", "run built-in invariant checks");
    selftest->add_flag("--mutate-hessian", mutate_hessian,
                       "corrupt the Hessian stencil (verifies the selftest catches it)");
    CLI::App* export_cmd =
        app.add_subcommand("export", "write mesh and field files for the configured surface");
    add_config(export_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (selftest->parsed()) return cmd_selftest(mutate_hessian);

        const RunConfig cfg = load_config(config_path);
        if (check_f->parsed()) return cmd_check_f(cfg);
        if (check_init->parsed()) return cmd_check_init(cfg);
        if (export_cmd->parsed()) return cmd_export(cfg, out_dir);

        std::vector<double> snapshot_times;
        if (!snapshot_spec.empty()) {
            std::size_t pos = 0;
            while (pos < snapshot_spec.size()) {
                std::size_t next = snapshot_spec.find(',', pos);
                if (next == std::string::npos) next = snapshot_spec.size();
                snapshot_times.push_back(std::stod(snapshot_spec.substr(pos, next - pos)));
                pos = next + 1;
            }
        }
        return cmd_solve(cfg, force, snapshot_times, out_dir);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
