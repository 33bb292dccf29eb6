// Command-line front end: builds scenario models from a JSON config, runs the
// connection/trajectory/deviation computations and the verification suite, and
// writes machine-readable CSV/JSON reports.
//
// Exit codes: 0 success, 1 verification failure, 2 config error,
//             3 runtime integration failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "osc2/osc2.hpp"

namespace fs = std::filesystem;
using namespace osc2;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct AtState {
    Vec x, y, y2;
    bool have_y2 = false;
};

/// Parses "x=0.785,0;y=0,1;y2=-0.25,0" (y2 may be "auto" or absent).
AtState parse_at(const std::string& text) {
    AtState at;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw InvalidSpec("--at: expected key=values in '" + part + "'");
        const std::string key = part.substr(0, eq);
        const std::string vals = part.substr(eq + 1);
        if (key == "y2" && vals == "auto") continue;
        Vec v;
        std::stringstream vs(vals);
        std::string tok;
        while (std::getline(vs, tok, ',')) {
            try {
                v.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw InvalidSpec("--at: cannot parse number '" + tok + "'");
            }
        }
        if (key == "x")
            at.x = v;
        else if (key == "y")
            at.y = v;
        else if (key == "y2") {
            at.y2 = v;
            at.have_y2 = true;
        } else
            throw InvalidSpec("--at: unknown block '" + key + "' (expected x, y, y2)");
    }
    return at;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

fs::path resolve_out(const std::string& configured, const fs::path& out_dir,
                     const std::string& fallback) {
    if (!configured.empty()) {
        fs::path p(configured);
        return p.is_absolute() ? p : out_dir / p;
    }
    return out_dir / fallback;
}

int run_coeffs(const ScenarioConfig& cfg, const std::string& at_text, const fs::path& out_dir) {
    const GeometryModel model = build_model(cfg.model);
    const ForceField force = build_force(cfg.force);

    Vec x = cfg.x0, y = cfg.y0;
    AtState at;
    if (!at_text.empty()) {
        at = parse_at(at_text);
        if (!at.x.empty()) x = at.x;
        if (!at.y.empty()) y = at.y;
    }
    if (static_cast<int>(x.size()) != model.n || static_cast<int>(y.size()) != model.n)
        throw InvalidSpec("--at/initial state blocks must have dimension n = " +
                          std::to_string(model.n));
    SecondOrderState s2 = at.have_y2
                              ? SecondOrderState{x, y, at.y2}
                              : on_extension_state(model, force, {x, y}, cfg.diff);
    if (static_cast<int>(s2.y2.size()) != model.n)
        throw InvalidSpec("--at: y2 block must have dimension n = " + std::to_string(model.n));
    validate_state(s2);

    GeometryEngine eng(model, cfg.diff);
    const FirstOrderState s1{s2.x, s2.y};
    json out;
    out["state"]["x"] = to_json(s2.x);
    out["state"]["y"] = to_json(s2.y);
    out["state"]["y2"] = to_json(s2.y2);
    out["g"] = to_json(eng.metric(s1));
    out["G"] = to_json(eng.spray(s2.x, s2.y));
    out["N"] = to_json(eng.nonlinear(s2.x, s2.y));
    out["L_berwald"] = to_json(eng.berwald(s2.x, s2.y));
    out["R_tor"] = to_json(curvature_R(model, s1, cfg.diff));
    const DualCoefficients ours = our_dual_coefficients(model, force, s2, cfg.diff);
    const DualCoefficients miron = miron_dual_coefficients(model, s2, cfg.diff);
    out["M1_ours"] = to_json(ours.M1);
    out["M2_ours"] = to_json(ours.M2);
    out["M1_miron"] = to_json(miron.M1);
    out["M2_miron"] = to_json(miron.M2);

    const std::string text = out.dump(2) + "\n";
    std::cout << text;
    if (!cfg.report_json.empty())
        write_text(resolve_out(cfg.report_json, out_dir, "coeffs.json"), text);
    return kExitOk;
}

int run_geodesic(const ScenarioConfig& cfg, const fs::path& out_dir) {
    const GeometryModel model = build_model(cfg.model);
    const ForceField force = build_force(cfg.force);
    const Trajectory traj =
        integrate_trajectory(model, force, cfg.initial_state(), cfg.integrator, cfg.diff);
    const auto provider = ours_provider(model, force, cfg.diff);
    const auto [r1, r2] = horizontality_residual(traj, provider);

    std::ostringstream csv;
    write_trajectory_csv(csv, traj, {{"res_h1", &r1}, {"res_h2", &r2}});
    write_text(resolve_out(cfg.trajectory_csv, out_dir, "geodesic.csv"), csv.str());

    json summary;
    summary["samples"] = traj.samples();
    summary["dt"] = cfg.integrator.dt;
    summary["t_end"] = cfg.integrator.t_end;
    summary["sup_res_h1"] = interior_sup(r1);
    summary["sup_res_h2"] = interior_sup(r2);
    summary["energy_drift"] = [&] {
        const auto e = energies(model, traj);
        double d = 0.0;
        for (double v : e) d = std::max(d, std::abs(v - e.front()));
        return d;
    }();
    const std::string text = summary.dump(2) + "\n";
    std::cout << text;
    write_text(resolve_out(cfg.report_json, out_dir, "geodesic_summary.json"), text);
    return kExitOk;
}

int run_jacobi(const ScenarioConfig& cfg, bool with_oracle, const fs::path& out_dir) {
    const GeometryModel model = build_model(cfg.model);
    const ForceField force = build_force(cfg.force);
    const Trajectory base =
        integrate_trajectory(model, force, cfg.initial_state(), cfg.integrator, cfg.diff);
    const Trajectory jac = integrate_jacobi(model, force, base, cfg.w0, cfg.w0dot, cfg.diff);
    const auto provider = ours_provider(model, force, cfg.diff);
    const auto res = v2_residual(jac, provider);
    const auto [r1, r2] = horizontality_residual(jac, provider);

    std::ostringstream csv;
    write_trajectory_csv(csv, jac, {{"res_v2", &res}}, /*include_deviation=*/true);
    write_text(resolve_out(cfg.trajectory_csv, out_dir, "jacobi.csv"), csv.str());

    json summary;
    summary["samples"] = jac.samples();
    summary["dt"] = cfg.integrator.dt;
    summary["t_end"] = cfg.integrator.t_end;
    summary["sup_res_v2"] = interior_sup(res);
    summary["sup_res_h1"] = interior_sup(r1);
    summary["sup_res_h2"] = interior_sup(r2);
    const auto conj = conjugate_times(jac);
    summary["conjugate_times"] = json(conj);
    if (with_oracle) {
        const Trajectory oracle = deviation_oracle(model, force, cfg.initial_state(), cfg.w0,
                                                   cfg.w0dot, cfg.integrator, 1e-4, false, cfg.diff);
        double sup_w = 0.0, sup_diff = 0.0;
        for (std::size_t k = 0; k < jac.samples(); ++k) {
            sup_w = std::max(sup_w, norm2(jac.w[k]));
            sup_diff = std::max(sup_diff, norm2(vec_sub(oracle.w[k], jac.w[k])));
        }
        summary["oracle_rel_sup_error"] = sup_diff / (1.0 + sup_w);
        summary["oracle_h"] = 1e-4;
    }
    const std::string text = summary.dump(2) + "\n";
    std::cout << text;
    write_text(resolve_out(cfg.report_json, out_dir, "jacobi_summary.json"), text);
    return kExitOk;
}

int run_verify(std::uint64_t seed, const std::string& suite, double tolerance_scale,
               const fs::path& out_dir) {
    verify::Options opt;
    opt.seed = seed;
    opt.suite = suite;
    opt.tolerance_scale = tolerance_scale;
    const verify::Report rep = verify::run_verify(opt);
    verify::print_report(std::cout, rep);
    write_text(out_dir / "verify_report.json", verify::report_to_json(rep).dump(2) + "\n");
    return rep.overall_pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "osc2: nonlinear connections on the second-order tangent bundle from first-order "
        "Lagrangians with external forces; trajectory, deviation and residual certification "
        "tooling"};
    app.footer(
        "Conventions: trajectories solve d2x/dt2 + 2G(x, dx/dt) = F(x, dx/dt), i.e. the\n"
        "covariant form delta y/dt = F; any 1/2 prefactor in your force model belongs\n"
        "inside F itself. Second-order coordinates are y2 = (1/2) d2x/dt2, so the\n"
        "on-extension lift is y2 = -G + F/2.\n"
        "Exit codes: 0 ok, 1 verification failure, 2 config error, 3 integration failure.");
    app.require_subcommand(1);

    std::string config_path, at_text, suite, out_dir_text = ".";
    std::uint64_t seed = 42;
    double tolerance_scale = 1.0;
    bool with_oracle = false;

    auto* coeffs = app.add_subcommand(
        "coeffs", "print connection data (g, G, N, L, R, dual coefficients) at a state");
    coeffs->add_option("--config", config_path, "scenario config JSON")->required();
    coeffs->add_option("--at", at_text,
                       "evaluation state 'x=..,..;y=..,..;y2=..,..' (y2 defaults to the "
                       "on-extension lift -G + F/2)");
    coeffs->add_option("--out-dir", out_dir_text, "output directory");

    auto* geo = app.add_subcommand("geodesic", "integrate the base flow and write CSV + summary");
    geo->add_option("--config", config_path, "scenario config JSON")->required();
    geo->add_option("--out-dir", out_dir_text, "output directory");

    auto* jac = app.add_subcommand("jacobi", "integrate a deviation field along the base flow");
    jac->add_option("--config", config_path, "scenario config JSON")->required();
    jac->add_flag("--oracle", with_oracle, "also run the finite-difference deviation oracle");
    jac->add_option("--out-dir", out_dir_text, "output directory");

    auto* ver = app.add_subcommand("verify", "run the verification suite");
    ver->add_option("--seed", seed, "seed for random-state sampling (default 42)");
    ver->add_option("--suite", suite, "run one suite only (e.g. homogeneity, oracle, acceptance)");
    ver->add_option("--tolerance-scale", tolerance_scale,
                    "scale all tolerances (0 makes every check fail; verification aid)");
    ver->add_option("--out-dir", out_dir_text, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    const fs::path out_dir(out_dir_text);
    ScenarioConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        if (*ver) {
            // config-free subcommand
        }
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (*coeffs) return run_coeffs(cfg, at_text, out_dir);
        if (*geo) return run_geodesic(cfg, out_dir);
        if (*jac) return run_jacobi(cfg, with_oracle, out_dir);
        if (*ver) return run_verify(seed, suite, tolerance_scale, out_dir);
    } catch (const InvalidSpec& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionMismatch& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
