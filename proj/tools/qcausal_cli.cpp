// qcausal: command-line driver for robustness sweeps, witness coverage and
// the conditioning demos.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "qcausal/explore.hpp"

using namespace qcausal;
namespace fs = std::filesystem;

namespace {

struct CoefficientFlags {
    std::string config;
    std::string preset;
    std::vector<double> c11, c15, c51;
    std::string grid;
    std::optional<double> tol;
    std::optional<int> jobs;
    std::string out;
    bool long_mode = false;
    bool keep_going = false;

    void attach(CLI::App* app, bool sweep_flags) {
        app->add_option("--config", config, "flat key = value config file; flags override it");
        app->add_option("--preset", preset, "coefficient preset: zero, quarter, uniform, star");
        app->add_option("--c11", c11, "c11 as RE IM")->expected(2);
        app->add_option("--c15", c15, "c15 as RE IM")->expected(2);
        app->add_option("--c51", c51, "c51 as RE IM")->expected(2);
        app->add_option("--tol", tol, "solver tolerance");
        if (!sweep_flags) return;
        app->add_option("--grid", grid, "grid size NxM (q points x theta points)");
        app->add_option("--jobs", jobs, "worker threads");
        app->add_option("--out", out, "output directory");
        app->add_flag("--long", long_mode, "full 100x100 grid");
        app->add_flag("--keep-going", keep_going, "record failing cells instead of aborting");
    }

    SweepConfig resolve() const {
        SweepConfig cfg;
        if (!config.empty()) cfg = load_config(config);
        std::map<std::string, std::string> kv;
        auto exact = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        auto pair = [&](const std::vector<double>& v) { return exact(v[0]) + " " + exact(v[1]); };
        if (!preset.empty()) kv["preset"] = preset;
        if (!c11.empty()) kv["c11"] = pair(c11);
        if (!c15.empty()) kv["c15"] = pair(c15);
        if (!c51.empty()) kv["c51"] = pair(c51);
        if (long_mode) kv["long"] = "true";
        if (!grid.empty()) kv["grid"] = grid;
        if (tol) kv["tol"] = exact(*tol);
        if (jobs) kv["jobs"] = std::to_string(*jobs);
        if (!out.empty()) kv["out"] = out;
        if (keep_going) kv["keep_going"] = "true";
        apply_config(cfg, kv);
        return cfg;
    }
};

std::string coefficient_text(const SweepConfig& cfg) {
    const auto& c = cfg.coefficients;
    auto z = [](cplx v) { return format_value(v.real()) + (v.imag() < 0 ? "" : "+") + format_value(v.imag()) + "i"; };
    return (cfg.preset.empty() ? std::string("custom") : cfg.preset) + " {c11, c15, c51} = {" + z(c.c11) + ", " + z(c.c15) +
           ", " + z(c.c51) + "}";
}

std::string stem(const SweepConfig& cfg) { return cfg.preset.empty() ? "custom" : cfg.preset; }

int run_sweep(const CoefficientFlags& flags) {
    SweepConfig cfg = flags.resolve();
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    std::cerr << "sweep " << coefficient_text(cfg) << " on " << cfg.grid_q << "x" << cfg.grid_theta << " grid, " << cfg.jobs
              << " job(s)\n";
    int done = 0;
    const int total = cfg.grid_q * cfg.grid_theta;
    SweepResult r;
    try {
        r = sweep(cfg, [&](const SweepCell&) {
            if (++done % 50 == 0 || done == total) std::cerr << "  " << done << "/" << total << " cells\n";
        });
    } catch (const SweepFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    fs::path base = fs::path(cfg.out_dir) / ("robustness_" + stem(cfg));
    {
        std::ofstream csv(base.string() + ".csv");
        write_csv(r, csv);
    }
    {
        std::ofstream svg(base.string() + ".svg");
        write_svg(r, svg, "Causal robustness, " + coefficient_text(cfg));
    }
    std::cout << "min robustness " << format_value(r.min_robustness()) << ", max " << format_value(r.max_robustness()) << "\n";
    std::cout << "wrote " << base.string() << ".csv and .svg\n";
    if (!r.all_optimal()) {
        std::cerr << "some cells were not solved to optimality\n";
        return 1;
    }
    return 0;
}

int run_cover(const CoefficientFlags& flags, const std::string& anchors_path) {
    SweepConfig cfg = flags.resolve();
    cfg.validate();
    auto anchors = load_anchors(anchors_path.empty() ? default_anchor_path() : anchors_path);
    CoverageReport rep = witness_cover(cfg.coefficients, anchors, cfg.grid_q, cfg.grid_theta, cfg.solver_options(), cfg.jobs);
    for (const auto& reg : rep.regions)
        std::cout << reg.anchor.label << " (q = " << format_value(reg.anchor.q) << ", theta = " << format_value(reg.anchor.theta)
                  << "): tr(S W) = " << format_value(reg.anchor_value) << ", detects " << reg.count() << " cells"
                  << (reg.certified ? "" : ", witness not certified") << "\n";
    std::cout << "uncovered cells: " << rep.uncovered.size() << " of " << rep.grid_q * rep.grid_theta << "\n";
    if (!cfg.out_dir.empty() && cfg.out_dir != ".") fs::create_directories(cfg.out_dir);
    fs::path path = fs::path(cfg.out_dir) / ("coverage_" + stem(cfg) + ".csv");
    std::ofstream out(path);
    out << "q,theta,witnesses\n";
    for (int k = 0; k < rep.grid_q * rep.grid_theta; ++k) {
        std::string ids;
        for (const auto& reg : rep.regions)
            if (reg.mask[k]) ids += (ids.empty() ? "" : " ") + reg.anchor.label;
        out << format_value(cfg.q_at(k / rep.grid_theta)) << ',' << format_value(cfg.theta_at(k % rep.grid_theta)) << ',' << ids
            << '\n';
    }
    std::cout << "wrote " << path.string() << "\n";
    return rep.uncovered.empty() ? 0 : 1;
}

ProcessMatrix pick_process(const std::string& name, const CoefficientFlags& flags, std::optional<double> q,
                           std::optional<double> theta) {
    if (!name.empty()) return named_process(name);
    if (!q || !theta) throw std::invalid_argument("give --process NAME or both --q and --theta");
    return conditioned_W(flags.resolve().coefficients, *q, *theta);
}

void write_json(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream(path) << j.dump(2) << "\n";
        std::cerr << "wrote " << path << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal robustness, witnesses and conditioning combs for two-party qubit processes"};
    app.require_subcommand(1);

    CoefficientFlags sweep_flags;
    auto* sweep_cmd = app.add_subcommand("sweep", "robustness heatmap of W(q, theta): CSV + SVG");
    sweep_flags.attach(sweep_cmd, true);

    CoefficientFlags cover_flags;
    std::string anchors_path;
    auto* cover_cmd = app.add_subcommand("cover", "witness coverage of the (q, theta) grid from anchor witnesses");
    cover_flags.attach(cover_cmd, true);
    cover_cmd->add_option("--anchors", anchors_path, "anchor CSV (label,q,theta)");

    std::string demo_name = "all";
    auto* demo_cmd = app.add_subcommand("demo", "conditioning demos");
    demo_cmd->add_option("name", demo_name, "heralded, opposing, delayed-choice, nogo, classical3, povm or all");

    CoefficientFlags single_flags;
    std::string process_name;
    std::optional<double> q, theta;
    std::string json_out;
    auto add_single = [&](CLI::App* cmd) {
        single_flags.attach(cmd, false);
        cmd->add_option("--process", process_name, "w_ocb, w_sharp, identity, markovian:r=R, markovian_mirror:r=R");
        cmd->add_option("--q", q, "conditioning parameter q");
        cmd->add_option("--theta", theta, "conditioning phase theta");
        cmd->add_option("--json", json_out, "write the result as JSON to this path (- for stdout)");
    };
    auto* rob_cmd = app.add_subcommand("robustness", "causal robustness of one process");
    add_single(rob_cmd);
    auto* wit_cmd = app.add_subcommand("witness", "optimal causal witness of one process");
    add_single(wit_cmd);
    std::string program_kind = "robustness";
    auto* export_cmd = app.add_subcommand("export-sdp", "write the conic program as JSON");
    add_single(export_cmd);
    export_cmd->add_option("--kind", program_kind, "robustness or witness")->check(CLI::IsMember({"robustness", "witness"}));
    auto* null_cmd = app.add_subcommand("nullspace", "solve the cross-term coefficient system");
    CoefficientFlags bound_flags;
    auto* bound_cmd = app.add_subcommand("bound", "positivity bound and smallest eigenvalue of the F-term comb");
    bound_flags.attach(bound_cmd, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep_cmd) return run_sweep(sweep_flags);
        if (*cover_cmd) return run_cover(cover_flags, anchors_path);
        if (*demo_cmd) {
            std::vector<std::string> names = demo_name == "all" ? demo_names() : std::vector<std::string>{demo_name};
            bool ok = true;
            for (const auto& n : names) {
                DemoReport r = demo(n);
                std::cout << r.text();
                ok = ok && r.passed;
            }
            return ok ? 0 : 1;
        }
        if (*rob_cmd) {
            ProcessMatrix w = pick_process(process_name, single_flags, q, theta);
            SolverOptions opt;
            if (single_flags.tol) opt.tolerance = *single_flags.tol;
            RobustnessResult r = causal_robustness(w, opt);
            CertificateAudit a = audit_certificates(r, w);
            std::printf("robustness %.10f (status %s, %d iterations, gap %.2e, certificate audit %.2e)\n", r.value,
                        to_string(r.report.status).c_str(), r.report.iterations, r.report.dual_gap, a.worst());
            if (!json_out.empty())
                write_json({{"robustness", r.value}, {"raw", r.raw}, {"w_ab", to_json(r.w_ab)}, {"w_ba", to_json(r.w_ba)},
                            {"report", to_json(r.report)}},
                           json_out);
            return 0;
        }
        if (*wit_cmd) {
            ProcessMatrix w = pick_process(process_name, single_flags, q, theta);
            SolverOptions opt;
            if (single_flags.tol) opt.tolerance = *single_flags.tol;
            WitnessResult r = optimal_witness(w, opt);
            bool verified = verify_witness(r.witness);
            std::printf("witness value tr(S W) = %.10f (status %s, certified %s, independent check %s)\n", r.value,
                        to_string(r.report.status).c_str(), r.witness.certified ? "yes" : "no", verified ? "feasible" : "infeasible");
            if (!json_out.empty())
                write_json({{"value", r.value}, {"witness", to_json(r.witness.op)}, {"report", to_json(r.report)}}, json_out);
            return verified ? 0 : 1;
        }
        if (*export_cmd) {
            ProcessMatrix w = pick_process(process_name, single_flags, q, theta);
            ConicProgram p = program_kind == "witness" ? witness_program(w.op()) : robustness_program(w.op());
            write_json(to_json(p), json_out);
            return 0;
        }
        if (*null_cmd) {
            CoefficientNullspace ns = solve_coefficient_nullspace();
            std::printf("nullspace dimension %d, relation residual %.2e\n", ns.dimension, ns.table_residual);
            return ns.table_residual < 1e-9 ? 0 : 1;
        }
        if (*bound_cmd) {
            SweepConfig cfg = bound_flags.resolve();
            const auto& c = cfg.coefficients;
            std::printf("N = %.12g, |P| = %.12g, N + sqrt(N^2 - 4|P|^2) = %.12g (limit 0.125)\n", c.norm_n(), std::abs(c.pairing()),
                        c.bound_value());
            if (!c.within_bound()) {
                std::printf("outside the positivity bound\n");
                return 1;
            }
            Comb u = build_upsilon_F(c);
            std::printf("lambda_min closed form %.12f, numeric %.12f\n", lambda_min_bound(c), support_lambda_min(u.op()));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
