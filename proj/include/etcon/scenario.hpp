#pragma once

#include <Eigen/Dense>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "protocol.hpp"
#include "simulator.hpp"
#include "synthesis.hpp"

namespace etcon {

// splitmix64: fixed cross-platform stream for seeded initial conditions
inline std::uint64_t splitmix64_next(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double uniform_pm1(std::uint64_t& s) {
    return 2.0 * (static_cast<double>(splitmix64_next(s) >> 11) * 0x1.0p-53) - 1.0;
}

enum class InitMode { random, zeros, explicit_values };

struct ScenarioConfig {
    Model model; // C stays 0x0 for state-feedback variants
    int agents = 0;
    std::vector<std::pair<int, int>> edges; // zero-based (from, to)
    bool undirected = false;
    int leader = 0; // zero-based
    Variant variant = Variant::undirected;
    ProtocolParams params;
    SimConfig sim;
    InitMode x0_mode = InitMode::random;
    Eigen::MatrixXd x0;
    InitMode v0_mode = InitMode::zeros;
    Eigen::MatrixXd v0;
    std::string out_dir = "runs/out";
    bool plots = true;
};

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> errs)
        : std::runtime_error(join(errs)), errors(std::move(errs)) {}
    std::vector<std::string> errors;

private:
    static std::string join(const std::vector<std::string>& errs) {
        std::string all = "scenario invalid:";
        for (const std::string& e : errs) all += "\n  - " + e;
        return all;
    }
};

inline bool parse_variant(const std::string& s, Variant& out) {
    for (Variant v : {Variant::undirected, Variant::directed, Variant::leader_follower,
                      Variant::output_undirected, Variant::output_directed,
                      Variant::comparison}) {
        if (s == variant_name(v)) {
            out = v;
            return true;
        }
    }
    return false;
}

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return trim(s.substr(pos)).empty();
    } catch (...) {
        return false;
    }
}

inline bool parse_bool(const std::string& s, bool& out) {
    if (s == "true" || s == "1") { out = true; return true; }
    if (s == "false" || s == "0") { out = false; return true; }
    return false;
}

inline bool parse_vector(const std::string& s, Eigen::VectorXd& out) {
    std::stringstream ss(s);
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) {
        double v;
        if (!parse_double(tok, v)) return false;
        vals.push_back(v);
    }
    if (vals.empty()) return false;
    out = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return true;
}

inline bool parse_matrix(const std::string& s, Eigen::MatrixXd& out) {
    std::vector<Eigen::VectorXd> rows;
    std::stringstream ss(s);
    std::string row;
    while (std::getline(ss, row, ';')) {
        row = trim(row);
        if (row.empty()) return false;
        Eigen::VectorXd r;
        if (!parse_vector(row, r)) return false;
        if (!rows.empty() && r.size() != rows.front().size()) return false;
        rows.push_back(std::move(r));
    }
    if (rows.empty()) return false;
    out.resize(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i];
    return true;
}

inline void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) os << "; ";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            os << buf;
        }
    }
}

inline void write_agent_array(std::ostream& os, const Eigen::VectorXd& v) {
    bool uniform = true;
    for (Eigen::Index i = 1; i < v.size(); ++i) uniform = uniform && v(i) == v(0);
    write_matrix(os, uniform ? Eigen::MatrixXd::Constant(1, 1, v.size() ? v(0) : 0.0)
                             : Eigen::MatrixXd(v.transpose()));
}

} // namespace detail

struct ParsedScenario {
    ScenarioConfig config;
    std::vector<std::string> errors;
};

inline ParsedScenario parse_scenario(std::istream& is) {
    ParsedScenario out;
    ScenarioConfig& sc = out.config;
    sc.params = ProtocolParams{}; // arrays filled from keys or defaulted later
    std::string section, line;
    int lineno = 0;
    auto err = [&](const std::string& msg) {
        out.errors.push_back("line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') { err("unterminated section header"); continue; }
            section = line.substr(1, line.size() - 2);
            if (section != "model" && section != "graph" && section != "protocol" &&
                section != "sim" && section != "init" && section != "output")
                err("unknown section [" + section + "]");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) { err("expected key = value"); continue; }
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) { err("expected key = value"); continue; }

        auto want_double = [&](double& dst) {
            if (!detail::parse_double(val, dst)) err(key + ": not a number");
        };
        auto want_matrix = [&](Eigen::MatrixXd& dst) {
            if (!detail::parse_matrix(val, dst)) err(key + ": bad matrix literal");
        };
        auto want_array = [&](Eigen::VectorXd& dst) {
            if (!detail::parse_vector(val, dst)) err(key + ": bad value list");
        };

        if (section == "model") {
            if (key == "A") want_matrix(sc.model.A);
            else if (key == "B") want_matrix(sc.model.B);
            else if (key == "C") want_matrix(sc.model.C);
            else err("unknown model key " + key);
        } else if (section == "graph") {
            if (key == "agents") {
                double v;
                want_double(v);
                sc.agents = static_cast<int>(v);
            } else if (key == "undirected") {
                if (!detail::parse_bool(val, sc.undirected)) err("undirected: expected true/false");
            } else if (key == "leader") {
                double v;
                want_double(v);
                sc.leader = static_cast<int>(v) - 1;
            } else if (key == "edges") {
                std::stringstream ss(val);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    item = detail::trim(item);
                    if (item.empty()) continue;
                    size_t arrow = item.find('>');
                    int from = 0, to = 0;
                    bool ok = arrow != std::string::npos;
                    if (ok) {
                        double a, b;
                        ok = detail::parse_double(detail::trim(item.substr(0, arrow)), a) &&
                             detail::parse_double(detail::trim(item.substr(arrow + 1)), b);
                        from = static_cast<int>(a) - 1;
                        to = static_cast<int>(b) - 1;
                    }
                    if (!ok) err("edges: expected entries like 1>2, got '" + item + "'");
                    else sc.edges.emplace_back(from, to);
                }
            } else err("unknown graph key " + key);
        } else if (section == "protocol") {
            if (key == "variant") {
                if (!parse_variant(val, sc.variant)) err("unknown variant '" + val + "'");
            } else if (key == "gamma") want_array(sc.params.gamma);
            else if (key == "theta1") want_double(sc.params.theta1);
            else if (key == "theta2") want_double(sc.params.theta2);
            else if (key == "k") want_array(sc.params.k);
            else if (key == "sigma") want_array(sc.params.sigma);
            else if (key == "eps0") want_array(sc.params.eps0);
            else if (key == "d0") want_array(sc.params.d0);
            else if (key == "mu") want_double(sc.params.mu);
            else if (key == "kappa") want_array(sc.params.kappa);
            else if (key == "phi1") want_double(sc.params.phi1);
            else if (key == "phi2") want_double(sc.params.phi2);
            else if (key == "c0") want_array(sc.params.c0);
            else if (key == "mu_rate") want_double(sc.params.mu_rate);
            else err("unknown protocol key " + key);
        } else if (section == "sim") {
            if (key == "t_end") want_double(sc.sim.t_end);
            else if (key == "h") want_double(sc.sim.h);
            else if (key == "localization_tol") want_double(sc.sim.localization_tol);
            else if (key == "sample_stride") {
                double v;
                want_double(v);
                sc.sim.sample_stride = static_cast<int>(v);
            } else if (key == "zeno_event_budget") {
                double v;
                want_double(v);
                sc.sim.zeno_event_budget = static_cast<long long>(v);
            } else if (key == "zeno_min_gap") want_double(sc.sim.zeno_min_gap);
            else if (key == "rng_seed") {
                double v;
                want_double(v);
                sc.sim.rng_seed = static_cast<std::uint64_t>(v);
            } else if (key == "divergence_norm") want_double(sc.sim.divergence_norm);
            else err("unknown sim key " + key);
        } else if (section == "init") {
            InitMode* mode = key == "x0" ? &sc.x0_mode : key == "v0" ? &sc.v0_mode : nullptr;
            Eigen::MatrixXd* mat = key == "x0" ? &sc.x0 : key == "v0" ? &sc.v0 : nullptr;
            if (!mode) err("unknown init key " + key);
            else if (val == "random") *mode = InitMode::random;
            else if (val == "zeros") *mode = InitMode::zeros;
            else {
                *mode = InitMode::explicit_values;
                want_matrix(*mat);
            }
        } else if (section == "output") {
            if (key == "dir") sc.out_dir = val;
            else if (key == "plots") {
                if (!detail::parse_bool(val, sc.plots)) err("plots: expected true/false");
            } else err("unknown output key " + key);
        } else {
            err("key outside any section");
        }
    }
    return out;
}

// Broadcasts scalar per-agent entries to N, fills defaulted arrays, and
// collects every semantic problem rather than stopping at the first.
inline std::vector<std::string> validate_scenario(ScenarioConfig& sc) {
    std::vector<std::string> errs;
    const int N = sc.agents;
    if (N < 1) errs.push_back("graph: agents must be >= 1");
    const Eigen::Index n = sc.model.A.rows();
    if (n == 0 || sc.model.A.cols() != n)
        errs.push_back("model: A must be square and nonempty");
    if (sc.model.B.rows() != n || sc.model.B.cols() < 1)
        errs.push_back("model: B must have as many rows as A");
    const bool needs_output = variant_is_output(sc.variant);
    if (needs_output) {
        if (sc.model.C.rows() < 1 || sc.model.C.cols() != n)
            errs.push_back("model: output variants need C with as many columns as A");
    } else if (sc.model.C.size() > 0 && sc.model.C.cols() != n) {
        errs.push_back("model: C must have as many columns as A");
    }

    if (N >= 1) {
        bool edges_ok = true;
        for (auto [from, to] : sc.edges) {
            if (from < 0 || from >= N || to < 0 || to >= N || from == to) {
                errs.push_back("graph: edge endpoints must be distinct agents in 1.." +
                               std::to_string(N));
                edges_ok = false;
                break;
            }
        }
        if (sc.leader < 0 || sc.leader >= N)
            errs.push_back("graph: leader must be an agent in 1.." + std::to_string(N));
        if (edges_ok) {
            Graph g(N, sc.edges, sc.undirected);
            switch (sc.variant) {
            case Variant::undirected:
            case Variant::output_undirected:
                if (!sc.undirected)
                    errs.push_back("graph: " + std::string(variant_name(sc.variant)) +
                                   " requires undirected = true");
                else if (N > 1 && !g.connected())
                    errs.push_back("graph: must be connected");
                break;
            case Variant::directed:
            case Variant::output_directed:
            case Variant::comparison:
                if (N > 1 && !g.strongly_connected())
                    errs.push_back("graph: must be strongly connected");
                break;
            case Variant::leader_follower:
                if (sc.leader >= 0 && sc.leader < N && !g.spanning_tree_from(sc.leader))
                    errs.push_back("graph: no spanning tree rooted at the leader");
                break;
            }
        }
    }

    if (N >= 1) {
        ProtocolParams defaults = ProtocolParams::defaults(N);
        auto fit = [&](Eigen::VectorXd& arr, const Eigen::VectorXd& dflt, const char* name) {
            if (arr.size() == 0) arr = dflt;
            else if (arr.size() == 1 && N > 1) arr = Eigen::VectorXd::Constant(N, arr(0));
            else if (arr.size() != N)
                errs.push_back(std::string("protocol: ") + name + " needs 1 or " +
                               std::to_string(N) + " values");
        };
        fit(sc.params.gamma, defaults.gamma, "gamma");
        fit(sc.params.k, defaults.k, "k");
        fit(sc.params.sigma, defaults.sigma, "sigma");
        fit(sc.params.eps0, defaults.eps0, "eps0");
        fit(sc.params.d0, defaults.d0, "d0");
        fit(sc.params.kappa, defaults.kappa, "kappa");
        fit(sc.params.c0, defaults.c0, "c0");
        try {
            sc.params.validate(sc.variant, N);
        } catch (const std::exception& e) {
            errs.push_back(e.what());
        }
    }

    try {
        sc.sim.validate();
    } catch (const std::exception& e) {
        errs.push_back(e.what());
    }

    if (sc.x0_mode == InitMode::explicit_values &&
        (sc.x0.rows() != N || sc.x0.cols() != n))
        errs.push_back("init: x0 needs one row per agent with one entry per state");
    if (sc.v0_mode == InitMode::explicit_values &&
        (sc.v0.rows() != N || sc.v0.cols() != n))
        errs.push_back("init: v0 needs one row per agent with one entry per state");
    if (sc.v0_mode == InitMode::random)
        errs.push_back("init: v0 supports zeros or explicit rows");
    return errs;
}

inline ScenarioConfig load_scenario(std::istream& is) {
    ParsedScenario pr = parse_scenario(is);
    std::vector<std::string> more = validate_scenario(pr.config);
    pr.errors.insert(pr.errors.end(), more.begin(), more.end());
    if (!pr.errors.empty()) throw ScenarioError(std::move(pr.errors));
    return pr.config;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioError({"cannot open " + path});
    return load_scenario(f);
}

inline void write_scenario(std::ostream& os, const ScenarioConfig& sc) {
    os << "[model]\nA = ";
    detail::write_matrix(os, sc.model.A);
    os << "\nB = ";
    detail::write_matrix(os, sc.model.B);
    os << "\n";
    if (sc.model.C.size() > 0) {
        os << "C = ";
        detail::write_matrix(os, sc.model.C);
        os << "\n";
    }
    os << "\n[graph]\nagents = " << sc.agents << "\n";
    os << "undirected = " << (sc.undirected ? "true" : "false") << "\n";
    if (sc.variant == Variant::leader_follower) os << "leader = " << (sc.leader + 1) << "\n";
    os << "edges = ";
    for (size_t e = 0; e < sc.edges.size(); ++e) {
        if (e) os << ", ";
        os << (sc.edges[e].first + 1) << '>' << (sc.edges[e].second + 1);
    }
    os << "\n";
    os << "\n[protocol]\nvariant = " << variant_name(sc.variant) << "\n";
    auto arr = [&](const char* name, const Eigen::VectorXd& v) {
        os << name << " = ";
        detail::write_agent_array(os, v);
        os << "\n";
    };
    auto num = [&](const char* name, double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << name << " = " << buf << "\n";
    };
    arr("gamma", sc.params.gamma);
    num("theta1", sc.params.theta1);
    num("theta2", sc.params.theta2);
    arr("k", sc.params.k);
    arr("sigma", sc.params.sigma);
    arr("eps0", sc.params.eps0);
    arr("d0", sc.params.d0);
    num("mu", sc.params.mu);
    if (sc.variant == Variant::comparison) {
        arr("kappa", sc.params.kappa);
        num("phi1", sc.params.phi1);
        num("phi2", sc.params.phi2);
        arr("c0", sc.params.c0);
        num("mu_rate", sc.params.mu_rate);
    }
    os << "\n[sim]\n";
    num("t_end", sc.sim.t_end);
    num("h", sc.sim.h);
    num("localization_tol", sc.sim.localization_tol);
    os << "sample_stride = " << sc.sim.sample_stride << "\n";
    os << "zeno_event_budget = " << sc.sim.zeno_event_budget << "\n";
    num("zeno_min_gap", sc.sim.zeno_min_gap);
    os << "rng_seed = " << sc.sim.rng_seed << "\n";
    num("divergence_norm", sc.sim.divergence_norm);
    os << "\n[init]\nx0 = ";
    if (sc.x0_mode == InitMode::random) os << "random";
    else if (sc.x0_mode == InitMode::zeros) os << "zeros";
    else detail::write_matrix(os, sc.x0);
    os << "\n";
    if (variant_is_output(sc.variant)) {
        os << "v0 = ";
        if (sc.v0_mode == InitMode::zeros) os << "zeros";
        else detail::write_matrix(os, sc.v0);
        os << "\n";
    }
    os << "\n[output]\ndir = " << sc.out_dir << "\n";
    os << "plots = " << (sc.plots ? "true" : "false") << "\n";
}

inline Graph make_graph(const ScenarioConfig& sc) {
    return Graph(sc.agents, sc.edges, sc.undirected);
}

inline Eigen::MatrixXd make_x0(const ScenarioConfig& sc) {
    const Eigen::Index n = sc.model.A.rows();
    if (sc.x0_mode == InitMode::explicit_values) return sc.x0;
    if (sc.x0_mode == InitMode::zeros) return Eigen::MatrixXd::Zero(sc.agents, n);
    std::uint64_t s = sc.sim.rng_seed;
    Eigen::MatrixXd x0(sc.agents, n);
    for (int i = 0; i < sc.agents; ++i)
        for (Eigen::Index j = 0; j < n; ++j) x0(i, j) = uniform_pm1(s);
    return x0;
}

inline Eigen::MatrixXd make_v0(const ScenarioConfig& sc) {
    if (sc.v0_mode == InitMode::explicit_values) return sc.v0;
    return Eigen::MatrixXd::Zero(sc.agents, sc.model.A.rows());
}

inline SynthesisMode synthesis_mode(Variant v) {
    return variant_is_output(v) ? SynthesisMode::output_feedback
                                : SynthesisMode::state_feedback_care;
}

} // namespace etcon
