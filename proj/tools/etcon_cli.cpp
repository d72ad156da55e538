#include <CLI11.hpp>
#include <etcon/etcon.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace etcon;

namespace {

void print_matrix(std::ostream& os, const char* name, const Eigen::MatrixXd& m) {
    char buf[40];
    os << name << " = ";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) os << "; ";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            std::snprintf(buf, sizeof(buf), "%.12g", m(i, j));
            os << buf;
        }
    }
    os << "\n";
}

// readers may poll the run directory while a sweep is in flight
void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
    }
    fs::rename(tmp, path);
}

struct RunResult {
    Trajectory tr;
    RunReport rep;
};

RunResult run_scenario(const ScenarioConfig& sc, const GainSet& gains, const Graph& graph) {
    RunResult out;
    Eigen::MatrixXd x0 = make_x0(sc);
    switch (sc.variant) {
    case Variant::undirected:
    case Variant::directed:
    case Variant::leader_follower: {
        StateFeedbackFamily fam(sc.variant, sc.model, gains, graph, sc.params, sc.leader);
        out.tr = simulate(fam, sc.sim, x0);
        break;
    }
    case Variant::output_undirected:
    case Variant::output_directed: {
        ObserverFamily fam(sc.variant, sc.model, gains, graph, sc.params);
        out.tr = simulate(fam, sc.sim, x0, make_v0(sc));
        break;
    }
    case Variant::comparison: {
        ComparisonFamily fam(sc.variant, sc.model, gains, graph, sc.params);
        out.tr = simulate(fam, sc.sim, x0);
        break;
    }
    }
    out.rep = make_report(out.tr, graph, sc.variant, sc.params, true, sc.leader);
    return out;
}

int exit_code(const RunReport& rep) {
    if (rep.status == RunStatus::zeno) return 3;
    if (rep.status == RunStatus::diverged) return 4;
    if (!rep.violations.empty()) return 2;
    return 0;
}

void write_artifacts(const fs::path& dir, const ScenarioConfig& sc, const Trajectory& tr,
                     const RunReport& rep) {
    fs::create_directories(dir);
    std::ostringstream buf;
    auto flush_to = [&](const char* name) {
        atomic_write(dir / name, buf.str());
        buf.str("");
    };
    write_trajectory_csv(buf, tr);
    flush_to("trajectory.csv");
    write_events_csv(buf, tr);
    flush_to("events.csv");
    write_report(buf, rep);
    flush_to("report.txt");
    write_scenario(buf, sc);
    flush_to("scenario.cfg");
    if (sc.plots) {
        plot_disagreement(buf, tr);
        flush_to("disagreement.svg");
        plot_gains(buf, tr);
        flush_to("gains.svg");
        plot_control(buf, tr);
        flush_to("control.svg");
        plot_events(buf, tr, sc.agents, tr.t_final);
        flush_to("events.svg");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive event-triggered consensus: gain synthesis and simulation"};
    app.require_subcommand(1);

    std::string cfg_path, out_override, variants_arg, run_dir;
    long long sweep = 0;
    long long seed_override = -1;
    double h_override = 0.0, t_override = 0.0;
    bool no_plots = false;

    CLI::App* synth = app.add_subcommand("synth", "synthesize and print controller gains");
    synth->add_option("config", cfg_path, "scenario file")->required();

    CLI::App* run = app.add_subcommand("run", "simulate a scenario and write run artifacts");
    run->add_option("config", cfg_path, "scenario file")->required();
    run->add_option("--seed", seed_override, "override rng_seed");
    run->add_option("--step", h_override, "override the step size h");
    run->add_option("--t-end", t_override, "override the horizon");
    run->add_option("--out", out_override, "override the output directory");
    run->add_option("--sweep", sweep, "run this many consecutive seeds concurrently");
    run->add_flag("--no-plots", no_plots, "skip svg plots");

    CLI::App* compare = app.add_subcommand("compare", "run two variants on one scenario");
    compare->add_option("config", cfg_path, "scenario file")->required();
    compare->add_option("--variants", variants_arg, "two comma-separated variant names")
        ->required();
    compare->add_option("--out", out_override, "override the output directory");

    CLI::App* report = app.add_subcommand("report", "recompute metrics from run artifacts");
    report->add_option("dir", run_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            ScenarioConfig sc = load_scenario(cfg_path);
            GainSet g = synthesize_gains(sc.model, synthesis_mode(sc.variant));
            std::cout << variant_name(sc.variant) << ": " << sc.agents << " agents, "
                      << sc.model.A.rows() << " states\n";
            print_matrix(std::cout, "K", g.K);
            print_matrix(std::cout, "Gamma", g.Gamma);
            print_matrix(std::cout, "Q", g.Q);
            print_matrix(std::cout, "P", g.P);
            if (g.F.size()) print_matrix(std::cout, "F", g.F);
            return 0;
        }

        if (run->parsed()) {
            ScenarioConfig sc = load_scenario(cfg_path);
            if (seed_override >= 0) sc.sim.rng_seed = static_cast<std::uint64_t>(seed_override);
            if (h_override > 0.0) sc.sim.h = h_override;
            if (t_override > 0.0) sc.sim.t_end = t_override;
            if (!out_override.empty()) sc.out_dir = out_override;
            if (no_plots) sc.plots = false;
            sc.sim.validate(); // overrides can break the step-size invariants

            Graph graph = make_graph(sc);
            GainSet gains = synthesize_gains(sc.model, synthesis_mode(sc.variant));

            if (sweep > 0) {
                std::vector<std::thread> pool;
                std::vector<int> codes(static_cast<size_t>(sweep), 0);
                std::vector<std::string> lines(static_cast<size_t>(sweep));
                for (long long k = 0; k < sweep; ++k) {
                    pool.emplace_back([&, k] {
                        ScenarioConfig local = sc;
                        local.sim.rng_seed = sc.sim.rng_seed + static_cast<std::uint64_t>(k);
                        fs::path dir = fs::path(sc.out_dir) /
                                       ("seed_" + std::to_string(local.sim.rng_seed));
                        local.out_dir = dir.string();
                        std::string tag = "seed " + std::to_string(local.sim.rng_seed);
                        try {
                            RunResult res = run_scenario(local, gains, graph);
                            write_artifacts(dir, local, res.tr, res.rep);
                            codes[static_cast<size_t>(k)] = exit_code(res.rep);
                            lines[static_cast<size_t>(k)] =
                                tag + ": status " + run_status_name(res.rep.status) +
                                ", events " + std::to_string(res.rep.total_events) +
                                ", violations " + std::to_string(res.rep.violations.size());
                        } catch (const std::exception& e) {
                            codes[static_cast<size_t>(k)] = 1;
                            lines[static_cast<size_t>(k)] = tag + ": error: " + e.what();
                        }
                    });
                }
                for (std::thread& th : pool) th.join();
                int worst = 0;
                for (size_t k = 0; k < lines.size(); ++k) {
                    std::cout << lines[k] << "\n";
                    worst = std::max(worst, codes[k]);
                }
                return worst;
            }

            RunResult res = run_scenario(sc, gains, graph);
            write_artifacts(sc.out_dir, sc, res.tr, res.rep);
            write_report(std::cout, res.rep);
            return exit_code(res.rep);
        }

        if (compare->parsed()) {
            ScenarioConfig sc = load_scenario(cfg_path);
            if (!out_override.empty()) sc.out_dir = out_override;
            size_t comma = variants_arg.find(',');
            Variant va, vb;
            if (comma == std::string::npos ||
                !parse_variant(variants_arg.substr(0, comma), va) ||
                !parse_variant(variants_arg.substr(comma + 1), vb)) {
                std::cerr << "--variants needs two names, e.g. directed,comparison\n";
                return 1;
            }
            RunReport reps[2];
            int codes[2] = {0, 0};
            Variant pair[2] = {va, vb};
            for (int k = 0; k < 2; ++k) {
                ScenarioConfig local = sc;
                local.variant = pair[k];
                std::vector<std::string> errs = validate_scenario(local);
                if (!errs.empty()) throw ScenarioError(std::move(errs));
                Graph graph = make_graph(local);
                GainSet gains = synthesize_gains(local.model, synthesis_mode(local.variant));
                RunResult res = run_scenario(local, gains, graph);
                fs::path dir = fs::path(sc.out_dir) / variant_name(pair[k]);
                local.out_dir = dir.string();
                write_artifacts(dir, local, res.tr, res.rep);
                reps[k] = res.rep;
                codes[k] = exit_code(res.rep);
            }
            if (codes[0] == 0 && codes[1] == 0) {
                ComparisonSummary cs = compare_protocols(reps[0], reps[1]);
                std::ostringstream buf;
                write_comparison(buf, cs);
                fs::create_directories(sc.out_dir);
                atomic_write(fs::path(sc.out_dir) / "comparison.txt", buf.str());
                std::cout << buf.str();
            } else {
                for (const RunReport& r : reps) write_report(std::cout, r);
            }
            return std::max(codes[0], codes[1]);
        }

        if (report->parsed()) {
            fs::path dir = run_dir;
            ScenarioConfig sc = load_scenario((dir / "scenario.cfg").string());
            std::ifstream tf(dir / "trajectory.csv"), ef(dir / "events.csv");
            if (!tf || !ef) {
                std::cerr << "missing run artifacts in " << dir.string() << "\n";
                return 1;
            }
            Trajectory tr = read_run_csv(tf, ef, sc.agents);
            Graph graph = make_graph(sc);
            for (Sample& smp : tr.samples)
                smp.xi_norm = consensus_error_norm(graph, smp.x);
            RunReport rep = make_report(tr, graph, sc.variant, sc.params, false, sc.leader);
            write_report(std::cout, rep);
            return 0;
        }
    } catch (const ScenarioError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
