// End-to-end acceptance checks, one printed line per criterion. Each check
// pins the tolerances it needs; a failing line carries the measured numbers.
#include <etcon/etcon.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace etcon;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void require(Outcome& o, bool ok, const std::string& what) {
    if (ok) return;
    o.pass = false;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += what;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

Model bench_model() {
    Model m;
    m.A = Eigen::MatrixXd{{0.0, 1.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, 0.0, 0.1}};
    m.B = Eigen::MatrixXd{{0.0}, {1.0}, {1.0}};
    return m;
}

// same dynamics up to a state reordering, so that the measured coordinates
// (drift mode plus one oscillator coordinate) make the pair detectable
Model output_model() {
    Model m;
    m.A = Eigen::MatrixXd{{0.1, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, -1.0, 0.0}};
    m.B = Eigen::MatrixXd{{1.0}, {0.0}, {1.0}};
    m.C = Eigen::MatrixXd{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    return m;
}

std::vector<std::pair<int, int>> ring_edges() {
    return {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {1, 4}, {3, 0}};
}

Eigen::MatrixXd seeded_x0(std::uint64_t seed, int N, int n) {
    std::uint64_t s = seed;
    Eigen::MatrixXd x0(N, n);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < n; ++j) x0(i, j) = uniform_pm1(s);
    return x0;
}

struct GapProbe {
    std::string name;
    bool tripped;
    double min_gap;
};

} // namespace

int main() {
    int failed = 0;
    auto timed = [&](int id, const char* label, auto&& body) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d: %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", id,
                    label, secs, o.detail.empty() ? "" : " - ", o.detail.c_str());
        if (!o.pass) ++failed;
    };

    std::vector<GapProbe> probes; // filled by criteria 3-6, judged by criterion 7
    auto probe = [&](const std::string& name, const Trajectory& tr, int N,
                     const SimConfig& cfg) {
        ZenoStats z = zeno_monitor(tr.events, N, cfg);
        probes.push_back(
            {name, z.tripped || tr.status == RunStatus::zeno, z.min_gap_per_agent.minCoeff()});
    };

    const Model bm = bench_model();
    const Graph ring(6, ring_edges(), false);
    const ProtocolParams par6 = ProtocolParams::defaults(6);
    const GainSet bench_gains = synthesize_gains(bm, SynthesisMode::state_feedback_care);
    SimConfig cfg_bench;
    cfg_bench.t_end = 20.0;
    cfg_bench.h = 1e-3;
    cfg_bench.rng_seed = 7;
    const Eigen::MatrixXd x0_bench = seeded_x0(7, 6, 3);
    Trajectory tr_bench;
    RunReport rep_bench;
    bool have_bench = false;

    timed(1, "gain reconstruction from the reference solution", [&](Outcome& o) {
        // the reference P is symmetric but was recorded with a sign slip in
        // one off-diagonal entry; both slots take the lower-triangle value
        const Eigen::Matrix3d P{{0.4792, 0.1955, 0.3510},
                                {0.1955, 1.0261, 0.7196},
                                {0.3510, 0.7196, 1.0700}};
        const Eigen::Vector3d b(0.0, 1.0, 1.0);
        const Eigen::Matrix3d Pinv = P.inverse();
        const Eigen::RowVector3d K = -b.transpose() * Pinv;
        const Eigen::Matrix3d Gamma = Pinv * b * b.transpose() * Pinv;
        const Eigen::RowVector3d K_ref(0.8409, -0.5412, -0.8465);
        const Eigen::Matrix3d G_ref{{0.7071, -0.4551, -0.7118},
                                    {-0.4551, 0.2929, 0.4581},
                                    {-0.7118, 0.4581, 0.7165}};
        double k_err = (K - K_ref).cwiseAbs().maxCoeff();
        double g_err = (Gamma - G_ref).cwiseAbs().maxCoeff();
        require(o, k_err < 5e-3, "max K error " + num(k_err));
        require(o, g_err < 5e-3, "max Gamma error " + num(g_err));
    });

    timed(2, "riccati residuals on random stabilizable pairs", [&](Outcome& o) {
        std::uint64_t s = 0x9e3779b97f4a7c15ull;
        int made = 0, attempts = 0;
        while (made < 100 && attempts < 10000 && o.pass) {
            ++attempts;
            int n = 1 + static_cast<int>(splitmix64_next(s) % 6);
            int p = 1 + static_cast<int>(splitmix64_next(s) % 3);
            Eigen::MatrixXd A(n, n), B(n, p);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) A(i, j) = 2.0 * uniform_pm1(s);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j) B(i, j) = 2.0 * uniform_pm1(s);
            if (!is_stabilizable(A, B)) continue;
            Eigen::MatrixXd Q = solve_care(A, B);
            double res = (A.transpose() * Q + Q * A - Q * B * B.transpose() * Q +
                          Eigen::MatrixXd::Identity(n, n))
                             .norm();
            double bound = 1e-8 * (1.0 + Q.squaredNorm());
            require(o, res <= bound,
                    "pair " + std::to_string(made) + " residual " + num(res) + " > " +
                        num(bound));
            require(o, is_hurwitz(A - B * B.transpose() * Q),
                    "pair " + std::to_string(made) + " closed loop not stable");
            ++made;
        }
        require(o, made == 100, "only " + std::to_string(made) + " pairs generated");
    });

    timed(3, "benchmark digraph run", [&](Outcome& o) {
        StateFeedbackFamily fam(Variant::directed, bm, bench_gains, ring, par6, 0);
        tr_bench = simulate(fam, cfg_bench, x0_bench);
        rep_bench = make_report(tr_bench, ring, Variant::directed, par6);
        have_bench = true;
        require(o, rep_bench.status == RunStatus::ok,
                "status " + std::string(run_status_name(rep_bench.status)) + " " +
                    rep_bench.status_detail);
        require(o, rep_bench.decay_factor <= 1e-2,
                "decay factor " + num(rep_bench.decay_factor));
        require(o, rep_bench.gain_plateau_delta < 1e-3,
                "gains still moving by " + num(rep_bench.gain_plateau_delta));
        require(o, rep_bench.min_gap.minCoeff() > 10.0 * cfg_bench.localization_tol,
                "min inter-event gap " + num(rep_bench.min_gap.minCoeff()));
        require(o, rep_bench.violations.empty(),
                std::to_string(rep_bench.violations.size()) + " invariant violations");
        probe("benchmark digraph", tr_bench, 6, cfg_bench);
    });

    timed(4, "seeded undirected sweep", [&](Outcome& o) {
        for (int seed = 0; seed < 20 && o.pass; ++seed) {
            const std::string tag = "seed " + std::to_string(seed) + " ";
            std::uint64_t s = 1000 + static_cast<std::uint64_t>(seed);
            int N = 3 + static_cast<int>(splitmix64_next(s) % 6);
            int n = 1 + static_cast<int>(splitmix64_next(s) % 3);
            std::vector<std::pair<int, int>> edges;
            for (int i = 1; i < N; ++i)
                edges.push_back({static_cast<int>(splitmix64_next(s) % i), i});
            for (int e = 0; e < N; ++e) {
                int a = static_cast<int>(splitmix64_next(s) % N);
                int b = static_cast<int>(splitmix64_next(s) % N);
                if (a != b) edges.push_back({a, b});
            }
            Graph g(N, edges, true);
            Model m;
            int tries = 0;
            for (;; ++tries) {
                if (tries > 200) {
                    require(o, false, tag + "no stabilizable model found");
                    return;
                }
                m.A.resize(n, n);
                m.B.resize(n, 1);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) m.A(i, j) = uniform_pm1(s);
                for (int i = 0; i < n; ++i) m.B(i, 0) = uniform_pm1(s);
                // cap the open-loop growth rate so late-horizon trigger rates
                // stay sane while the thresholds decay
                Eigen::EigenSolver<Eigen::MatrixXd> es(m.A, false);
                double alpha = es.eigenvalues().real().maxCoeff();
                if (alpha > 0.05)
                    m.A.diagonal().array() -= alpha - 0.05;
                if (is_stabilizable(m.A, m.B)) break;
            }
            GainSet gains = synthesize_gains(m, SynthesisMode::state_feedback_care);
            ProtocolParams par = ProtocolParams::defaults(N);
            SimConfig cfg;
            cfg.t_end = 40.0;
            cfg.h = 1e-3;
            cfg.rng_seed = 1000 + static_cast<std::uint64_t>(seed);
            Eigen::MatrixXd x0(N, n);
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < n; ++j) x0(i, j) = uniform_pm1(s);
            StateFeedbackFamily fam(Variant::undirected, m, gains, g, par, 0);
            Trajectory tr = simulate(fam, cfg, x0);
            RunReport rep = make_report(tr, g, Variant::undirected, par);
            require(o, rep.status == RunStatus::ok,
                    tag + "status " + std::string(run_status_name(rep.status)));
            require(o, rep.decay_factor <= 1e-2,
                    tag + "decay factor " + num(rep.decay_factor));
            require(o, rep.violations.empty(),
                    tag + std::to_string(rep.violations.size()) + " invariant violations");
            probe("undirected " + tag, tr, N, cfg);
        }
    });

    timed(5, "leader tracking on chain and star", [&](Outcome& o) {
        auto run_lf = [&](const std::string& name,
                          const std::vector<std::pair<int, int>>& edges) {
            Graph g(6, edges, false);
            SimConfig cfg;
            cfg.t_end = 30.0;
            cfg.h = 1e-3;
            cfg.rng_seed = 11;
            Eigen::MatrixXd x0 = seeded_x0(11, 6, 3);
            StateFeedbackFamily fam(Variant::leader_follower, bm, bench_gains, g, par6, 0);
            Trajectory tr = simulate(fam, cfg, x0);
            RunReport rep = make_report(tr, g, Variant::leader_follower, par6, true, 0);
            require(o, rep.status == RunStatus::ok,
                    name + " status " + std::string(run_status_name(rep.status)));
            require(o, rep.violations.empty(),
                    name + " " + std::to_string(rep.violations.size()) +
                        " invariant violations");
            auto spread = [](const Sample& smp) {
                double w = 0.0;
                for (int i = 1; i < 6; ++i)
                    w = std::max(w, (smp.x.row(i) - smp.x.row(0)).norm());
                return w;
            };
            double w0 = spread(tr.samples.front());
            double wT = spread(tr.samples.back());
            require(o, wT < 1e-2 * w0,
                    name + " tracking spread " + num(wT) + " vs initial " + num(w0));
            bool leader_fired = false, state_only = true;
            for (const EventRecord& ev : tr.events) {
                if (ev.agent != 0) continue;
                leader_fired = true;
                if (ev.condition != "state") state_only = false;
            }
            require(o, leader_fired, name + " leader never broadcast");
            require(o, state_only, name + " leader fired a non-state trigger");
            probe(name, tr, 6, cfg);
        };
        run_lf("leader chain", {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
        run_lf("leader star", {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    });

    timed(6, "output feedback inside the observer envelope", [&](Outcome& o) {
        const Model om = output_model();
        const GainSet og = synthesize_gains(om, SynthesisMode::output_feedback);
        Eigen::EigenSolver<Eigen::MatrixXd> es(om.A + og.F * om.C);
        double abar = es.eigenvalues().real().maxCoeff() + 0.05;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
        double kappa2 = svd.singularValues()(0) /
                        svd.singularValues()(svd.singularValues().size() - 1);
        double c = std::max(1.0, kappa2);
        auto run_of = [&](const std::string& name, Variant v, bool undirected) {
            Graph g(6, ring_edges(), undirected);
            SimConfig cfg;
            cfg.t_end = 30.0;
            cfg.h = 1e-3;
            cfg.rng_seed = 13;
            Eigen::MatrixXd x0 = seeded_x0(13, 6, 3);
            Eigen::MatrixXd v0 = Eigen::MatrixXd::Zero(6, 3);
            ObserverFamily fam(v, om, og, g, par6);
            Trajectory tr = simulate(fam, cfg, x0, v0);
            RunReport rep = make_report(tr, g, v, par6);
            require(o, rep.status == RunStatus::ok,
                    name + " status " + std::string(run_status_name(rep.status)));
            require(o, rep.decay_factor <= 1e-2,
                    name + " decay factor " + num(rep.decay_factor));
            require(o, rep.violations.empty(),
                    name + " " + std::to_string(rep.violations.size()) +
                        " invariant violations");
            const Eigen::VectorXd z0 = tr.samples.front().z_norm;
            for (const Sample& smp : tr.samples) {
                double shrink = c * std::exp(abar * smp.t);
                for (int i = 0; i < 6; ++i) {
                    if (smp.z_norm(i) <= shrink * z0(i) + 1e-9) continue;
                    require(o, false,
                            name + " observer error outside the envelope at t=" +
                                num(smp.t) + " (agent " + std::to_string(i + 1) +
                                ", " + num(smp.z_norm(i)) + " > " +
                                num(shrink * z0(i)) + ")");
                    return;
                }
            }
            probe(name, tr, 6, cfg);
        };
        run_of("output undirected", Variant::output_undirected, true);
        run_of("output directed", Variant::output_directed, false);
    });

    timed(7, "no runaway triggering in any run", [&](Outcome& o) {
        require(o, probes.size() >= 25, "only " + std::to_string(probes.size()) +
                                            " runs were recorded");
        for (const GapProbe& p : probes) {
            require(o, !p.tripped, p.name + " tripped the event monitor");
            require(o, p.min_gap > 0.0, p.name + " produced a zero inter-event gap");
        }
    });

    timed(8, "dynamic protocol broadcasts more than the relative-state one",
          [&](Outcome& o) {
              require(o, have_bench, "benchmark digraph run unavailable");
              if (!have_bench) return;
              ComparisonFamily fam(Variant::comparison, bm, bench_gains, ring, par6);
              Trajectory tr = simulate(fam, cfg_bench, x0_bench);
              RunReport rep = make_report(tr, ring, Variant::comparison, par6);
              require(o, rep.status == RunStatus::ok,
                      "status " + std::string(run_status_name(rep.status)));
              require(o, rep_bench.total_events > rep.total_events,
                      "dynamic " + std::to_string(rep_bench.total_events) +
                          " <= relative-state " + std::to_string(rep.total_events));
          });

    timed(9, "byte-identical reruns and step refinement", [&](Outcome& o) {
        require(o, have_bench, "benchmark digraph run unavailable");
        if (!have_bench) return;
        StateFeedbackFamily fam(Variant::directed, bm, bench_gains, ring, par6, 0);
        Trajectory tr = simulate(fam, cfg_bench, x0_bench);
        auto csv = [](const Trajectory& t) {
            std::ostringstream a, b;
            write_trajectory_csv(a, t);
            write_events_csv(b, t);
            return std::pair<std::string, std::string>(a.str(), b.str());
        };
        auto [traj_a, ev_a] = csv(tr_bench);
        auto [traj_b, ev_b] = csv(tr);
        require(o, traj_a == traj_b, "trajectory csv differs between identical runs");
        require(o, ev_a == ev_b, "event csv differs between identical runs");
        SimConfig half = cfg_bench;
        half.h = cfg_bench.h / 2.0;
        StateFeedbackFamily fam_h(Variant::directed, bm, bench_gains, ring, par6, 0);
        Trajectory tr_h = simulate(fam_h, half, x0_bench);
        double coarse = consensus_error_norm(ring, tr_bench.samples.back().x);
        double fine = consensus_error_norm(ring, tr_h.samples.back().x);
        double rel = std::abs(fine - coarse) / std::max(coarse, 1e-300);
        require(o, rel <= 1e-2,
                "final consensus error moved by " + num(100.0 * rel) + "% under h/2");
    });

    if (failed == 0)
        std::printf("all 9 criteria hold\n");
    else
        std::printf("%d of 9 criteria failing\n", failed);
    return failed == 0 ? 0 : 1;
}
