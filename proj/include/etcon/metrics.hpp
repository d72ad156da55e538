#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "protocol.hpp"
#include "simulator.hpp"

namespace etcon {

inline Eigen::MatrixXd consensus_error(const Graph& g, const Eigen::MatrixXd& x) {
    return g.laplacian() * x;
}

inline double consensus_error_norm(const Graph& g, const Eigen::MatrixXd& x) {
    return consensus_error(g, x).norm();
}

struct Violation {
    std::string invariant;
    double t = 0.0;
    int agent = -1; // zero-based, -1 when not agent-specific
    double magnitude = 0.0;
};

// Every invariant is evaluated at every sample; violations are collected,
// never thrown. Tolerances: 1e-6 relative plus the run's recorded
// localization overshoot where the derivation depends on trigger respect.
inline std::vector<Violation> verify_invariants(const Trajectory& tr, const Graph& g,
                                                Variant variant, const ProtocolParams& par) {
    std::vector<Violation> bad;
    if (tr.samples.empty()) return bad;
    const int N = g.agents();
    const bool is_cmp = variant == Variant::comparison;
    const double S_over = tr.max_overshoot;

    Eigen::VectorXd lii = g.laplacian().diagonal();
    const double eps_budget = (par.gamma.array() * par.eps0.array() / par.k.array()).sum();
    Eigen::VectorXd c13 = 4.0 * lii.array().square() * eps_budget;

    const Eigen::VectorXd d_init = tr.samples.front().d;
    const Eigen::VectorXd dbar_init = tr.samples.front().d_bar;

    const Sample* prev = nullptr;
    for (const Sample& smp : tr.samples) {
        const double t = smp.t;
        if (prev) {
            for (int i = 0; i < N; ++i)
                if (smp.d(i) < prev->d(i) - 1e-12)
                    bad.push_back({"gain_monotonicity", t, i, prev->d(i) - smp.d(i)});
            if (!is_cmp)
                for (int i = 0; i < N; ++i)
                    if (smp.d_bar(i) < prev->d_bar(i) - 1e-12)
                        bad.push_back({"virtual_gain_monotonicity", t, i,
                                       prev->d_bar(i) - smp.d_bar(i)});
        }
        if (!is_cmp) {
            for (int i = 0; i < N; ++i) {
                if (!(smp.eps(i) > 0.0))
                    bad.push_back({"eps_positive", t, i, smp.eps(i)});
                double up = std::exp(-par.k(i) * t) * par.eps0(i);
                double lo = std::exp(-(par.k(i) + par.sigma(i) * par.gamma(i)) * t) * par.eps0(i);
                double slack = par.sigma(i) * S_over / (par.k(i) + par.sigma(i) * par.gamma(i));
                if (smp.eps(i) > up * (1.0 + 1e-6) + 1e-12)
                    bad.push_back({"eps_upper_envelope", t, i, smp.eps(i) - up});
                if (smp.eps(i) < lo * (1.0 - 1e-6) - slack - 1e-12)
                    bad.push_back({"eps_lower_envelope", t, i, lo - smp.eps(i)});
            }
            if (variant == Variant::undirected) {
                for (int i = 0; i < N; ++i) {
                    double bound = 2.0 * smp.d_bar(i) - dbar_init(i) + d_init(i) + c13(i);
                    if (smp.d(i) > bound * (1.0 + 1e-6) + 1e-9)
                        bad.push_back({"gain_bound", t, i, smp.d(i) - bound});
                }
            }
        }
        for (int i = 0; i < N; ++i) {
            double worst = smp.state_margin(i);
            if (std::isfinite(smp.gain_margin(i))) worst = std::max(worst, smp.gain_margin(i));
            if (worst > S_over + 1e-12)
                bad.push_back({"threshold_respect", t, i, worst - S_over});
        }
        prev = &smp;
    }

    // reset property at the recorded post-event instant: the firing agent's
    // sampling errors are exact zeros, so its margins take their floor values
    {
        size_t k = 0;
        for (const EventRecord& ev : tr.events) {
            while (k + 1 < tr.samples.size() && tr.samples[k + 1].t <= ev.t) ++k;
            const Sample& smp = tr.samples[k];
            if (smp.t != ev.t) {
                bad.push_back({"reset_sample_missing", ev.t, ev.agent, 0.0});
                continue;
            }
            const int i = ev.agent;
            if (is_cmp) {
                if (!(smp.state_margin(i) < 0.0) || !(smp.gain_margin(i) < 0.0))
                    bad.push_back({"reset_exact", ev.t, i,
                                   std::max(smp.state_margin(i), smp.gain_margin(i))});
                continue;
            }
            bool state_ok = smp.state_margin(i) == -(par.gamma(i) * smp.eps(i));
            bool gain_ok = !std::isfinite(smp.gain_margin(i)) || smp.gain_margin(i) == -par.theta1;
            if (!state_ok || !gain_ok)
                bad.push_back({"reset_exact", ev.t, i, smp.state_margin(i)});
        }
    }

    // control inputs are piecewise constant: a change between consecutive
    // samples needs a logged event of the agent or an in-neighbor in between
    {
        std::vector<double> ev_t(tr.events.size());
        for (size_t e = 0; e < tr.events.size(); ++e) ev_t[e] = tr.events[e].t;
        auto in_nbrs = detail::neighbor_lists(g, true);
        for (size_t k = 1; k < tr.samples.size(); ++k) {
            const Sample& a = tr.samples[k - 1];
            const Sample& b = tr.samples[k];
            auto first = (a.t == b.t)
                             ? std::lower_bound(ev_t.begin(), ev_t.end(), a.t)
                             : std::upper_bound(ev_t.begin(), ev_t.end(), a.t);
            auto last = std::upper_bound(ev_t.begin(), ev_t.end(), b.t);
            for (int i = 0; i < N; ++i) {
                if (a.u.row(i) == b.u.row(i)) continue;
                bool explained = false;
                for (auto it = first; it != last && !explained; ++it) {
                    int src = tr.events[static_cast<size_t>(it - ev_t.begin())].agent;
                    if (src == i) explained = true;
                    if (!is_cmp && !explained)
                        for (int j : in_nbrs[i])
                            if (src == j) { explained = true; break; }
                }
                if (!explained)
                    bad.push_back({"control_piecewise_constant", b.t, i,
                                   (b.u.row(i) - a.u.row(i)).norm()});
            }
        }
    }
    return bad;
}

struct ZenoStats {
    Eigen::VectorXd min_gap_per_agent;
    long long total_events = 0;
    bool tripped = false;
};

inline ZenoStats zeno_monitor(const std::vector<EventRecord>& events, int N,
                              const SimConfig& cfg) {
    ZenoStats z;
    z.min_gap_per_agent =
        Eigen::VectorXd::Constant(N, std::numeric_limits<double>::infinity());
    z.total_events = static_cast<long long>(events.size());
    z.tripped = z.total_events > cfg.zeno_event_budget;
    std::vector<double> last(N, -1.0);
    std::vector<int> consec(N, 0);
    for (const EventRecord& ev : events) {
        int i = ev.agent;
        if (last[i] >= 0.0) {
            double gap = ev.t - last[i];
            z.min_gap_per_agent(i) = std::min(z.min_gap_per_agent(i), gap);
            if (gap < cfg.zeno_min_gap) {
                if (++consec[i] >= 100) z.tripped = true;
            } else {
                consec[i] = 0;
            }
        }
        last[i] = ev.t;
    }
    return z;
}

struct RunReport {
    std::string variant;
    int agents = 0;
    RunStatus status = RunStatus::ok;
    std::string status_detail;
    double t_final = 0.0;
    double initial_consensus_error = 0.0;
    double final_consensus_error = 0.0;
    double decay_factor = 0.0;
    std::vector<long long> event_count;
    long long total_events = 0;     // broadcast count
    long long controller_updates = 0;
    Eigen::VectorXd min_gap;
    Eigen::VectorXd mean_gap;
    Eigen::VectorXd gain_final;
    double gain_plateau_delta = 0.0; // largest gain change over the final second
    double max_overshoot = 0.0;
    long long clamped = 0;
    std::vector<Violation> violations;
};

inline RunReport make_report(const Trajectory& tr, const Graph& g, Variant variant,
                             const ProtocolParams& par, bool verify = true,
                             int leader = 0) {
    RunReport r;
    const int N = g.agents();
    r.variant = variant_name(variant);
    r.agents = N;
    r.status = tr.status;
    r.status_detail = tr.status_detail;
    r.t_final = tr.t_final;
    r.max_overshoot = tr.max_overshoot;
    r.clamped = tr.clamped;
    r.event_count = tr.event_count;
    r.total_events = static_cast<long long>(tr.events.size());

    const bool is_cmp = variant == Variant::comparison;
    for (const EventRecord& ev : tr.events) {
        if (is_cmp) {
            ++r.controller_updates;
        } else {
            bool own = !(variant == Variant::leader_follower && ev.agent == leader);
            r.controller_updates += (own ? 1 : 0) +
                                    static_cast<long long>(g.out_neighbors(ev.agent).size());
        }
    }

    if (!tr.samples.empty()) {
        r.initial_consensus_error = tr.samples.front().xi_norm;
        r.final_consensus_error = tr.samples.back().xi_norm;
        r.decay_factor =
            r.final_consensus_error / std::max(r.initial_consensus_error, 1e-300);
        r.gain_final = tr.samples.back().d;
        double t_from = tr.t_final - 1.0;
        const Sample* base = &tr.samples.front();
        for (const Sample& smp : tr.samples)
            if (smp.t >= t_from) { base = &smp; break; }
        r.gain_plateau_delta = (tr.samples.back().d - base->d).cwiseAbs().maxCoeff();
    }

    r.min_gap = Eigen::VectorXd::Constant(N, std::numeric_limits<double>::infinity());
    r.mean_gap = Eigen::VectorXd::Constant(N, std::numeric_limits<double>::infinity());
    std::vector<double> last(N, -1.0), sum(N, 0.0);
    std::vector<long long> gaps(N, 0);
    for (const EventRecord& ev : tr.events) {
        int i = ev.agent;
        if (last[i] >= 0.0) {
            double gap = ev.t - last[i];
            r.min_gap(i) = std::min(r.min_gap(i), gap);
            sum[i] += gap;
            ++gaps[i];
        }
        last[i] = ev.t;
    }
    for (int i = 0; i < N; ++i)
        if (gaps[i] > 0) r.mean_gap(i) = sum[i] / static_cast<double>(gaps[i]);

    if (verify) r.violations = verify_invariants(tr, g, variant, par);
    return r;
}

struct ComparisonSummary {
    std::string variant_a, variant_b;
    Eigen::VectorXd event_ratio; // per agent, a/b
    double total_ratio = 0.0;
    long long total_a = 0, total_b = 0;
    double decay_a = 0.0, decay_b = 0.0;
};

inline ComparisonSummary compare_protocols(const RunReport& a, const RunReport& b) {
    if (a.agents != b.agents || a.t_final != b.t_final)
        throw std::invalid_argument("compare: reports come from different scenarios");
    ComparisonSummary c;
    c.variant_a = a.variant;
    c.variant_b = b.variant;
    c.event_ratio.resize(a.agents);
    for (int i = 0; i < a.agents; ++i) {
        double den = static_cast<double>(b.event_count[i]);
        c.event_ratio(i) = den > 0 ? static_cast<double>(a.event_count[i]) / den
                                   : std::numeric_limits<double>::infinity();
    }
    c.total_a = a.total_events;
    c.total_b = b.total_events;
    c.total_ratio = b.total_events > 0
                        ? static_cast<double>(a.total_events) / static_cast<double>(b.total_events)
                        : std::numeric_limits<double>::infinity();
    c.decay_a = a.decay_factor;
    c.decay_b = b.decay_factor;
    return c;
}

// ---------------------------------------------------------------------------
// Run artifacts. All numbers use 12 significant digits.
// ---------------------------------------------------------------------------
namespace detail {
inline void put_num(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    os << buf;
}
} // namespace detail

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    if (tr.samples.empty()) return;
    const Sample& first = tr.samples.front();
    const int N = static_cast<int>(first.x.rows());
    const int n = static_cast<int>(first.x.cols());
    const int p = static_cast<int>(first.u.cols());
    const bool obs = first.v.size() > 0;
    os << "t,agent";
    for (int j = 1; j <= n; ++j) os << ",x" << j;
    os << ",d,d_hat,eps";
    for (int j = 1; j <= p; ++j) os << ",u" << j;
    if (obs) {
        for (int j = 1; j <= n; ++j) os << ",v" << j;
        os << ",e,z_norm";
    }
    os << "\n";
    for (const Sample& smp : tr.samples) {
        for (int i = 0; i < N; ++i) {
            detail::put_num(os, smp.t);
            os << ',' << (i + 1);
            for (int j = 0; j < n; ++j) { os << ','; detail::put_num(os, smp.x(i, j)); }
            os << ','; detail::put_num(os, smp.d(i));
            os << ','; detail::put_num(os, smp.d_hat(i));
            os << ','; detail::put_num(os, smp.eps(i));
            for (int j = 0; j < p; ++j) { os << ','; detail::put_num(os, smp.u(i, j)); }
            if (obs) {
                for (int j = 0; j < n; ++j) { os << ','; detail::put_num(os, smp.v(i, j)); }
                os << ','; detail::put_num(os, smp.d(i));
                os << ','; detail::put_num(os, smp.z_norm(i));
            }
            os << "\n";
        }
    }
}

inline void write_events_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,agent,condition\n";
    for (const EventRecord& ev : tr.events) {
        detail::put_num(os, ev.t);
        os << ',' << (ev.agent + 1) << ',' << ev.condition << "\n";
    }
}

inline void write_report(std::ostream& os, const RunReport& r) {
    os << "run: variant=" << r.variant << " agents=" << r.agents
       << " status=" << run_status_name(r.status) << "\n";
    if (!r.status_detail.empty()) os << "  " << r.status_detail << "\n";
    os << "horizon: t_final=";
    detail::put_num(os, r.t_final);
    os << "\nconsensus error: initial=";
    detail::put_num(os, r.initial_consensus_error);
    os << " final=";
    detail::put_num(os, r.final_consensus_error);
    os << " decay_factor=";
    detail::put_num(os, r.decay_factor);
    os << "\nevents: total=" << r.total_events
       << " controller_updates=" << r.controller_updates << " clamped=" << r.clamped
       << "\n";
    for (int i = 0; i < r.agents; ++i) {
        os << "  agent " << (i + 1) << ": events=" << r.event_count[i] << " min_gap=";
        detail::put_num(os, r.min_gap(i));
        os << " mean_gap=";
        detail::put_num(os, r.mean_gap(i));
        os << " gain_final=";
        detail::put_num(os, r.gain_final.size() > i ? r.gain_final(i) : 0.0);
        os << "\n";
    }
    os << "gain plateau delta (final 1 s): ";
    detail::put_num(os, r.gain_plateau_delta);
    os << "\nlocalization overshoot: ";
    detail::put_num(os, r.max_overshoot);
    os << "\ninvariants: " << (r.violations.empty() ? "all hold" : "VIOLATED") << "\n";
    for (size_t k = 0; k < r.violations.size() && k < 50; ++k) {
        const Violation& v = r.violations[k];
        os << "  " << v.invariant << " t=";
        detail::put_num(os, v.t);
        if (v.agent >= 0) os << " agent=" << (v.agent + 1);
        os << " magnitude=";
        detail::put_num(os, v.magnitude);
        os << "\n";
    }
    if (r.violations.size() > 50)
        os << "  ... " << (r.violations.size() - 50) << " more\n";
    // machine-readable block
    os << "[summary]\n";
    os << "variant = " << r.variant << "\n";
    os << "status = " << run_status_name(r.status) << "\n";
    os << "t_final = "; detail::put_num(os, r.t_final); os << "\n";
    os << "decay_factor = "; detail::put_num(os, r.decay_factor); os << "\n";
    os << "total_events = " << r.total_events << "\n";
    os << "controller_updates = " << r.controller_updates << "\n";
    os << "violations = " << r.violations.size() << "\n";
}

inline void write_comparison(std::ostream& os, const ComparisonSummary& c) {
    os << "comparison: " << c.variant_a << " vs " << c.variant_b << "\n";
    os << "events: " << c.total_a << " vs " << c.total_b << " ratio=";
    detail::put_num(os, c.total_ratio);
    os << "\n";
    for (int i = 0; i < c.event_ratio.size(); ++i) {
        os << "  agent " << (i + 1) << " ratio=";
        detail::put_num(os, c.event_ratio(i));
        os << "\n";
    }
    os << "decay: ";
    detail::put_num(os, c.decay_a);
    os << " vs ";
    detail::put_num(os, c.decay_b);
    os << "\n";
}

// Reads back the artifacts written above; margins and diagnostics are not in
// the CSV, so the result supports metrics but not invariant re-verification.
inline Trajectory read_run_csv(std::istream& traj_csv, std::istream& events_csv, int N) {
    Trajectory tr;
    std::string line;
    if (!std::getline(traj_csv, line)) throw std::runtime_error("trajectory csv: empty");
    int ncols = 1;
    for (char ch : line) ncols += ch == ',';
    bool obs = line.find(",z_norm") != std::string::npos;
    int n = 0, p = 0;
    {
        std::stringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ',')) {
            if (tok.size() >= 2 && tok[0] == 'x' && std::isdigit(static_cast<unsigned char>(tok[1])))
                n = std::max(n, std::atoi(tok.c_str() + 1));
            if (tok.size() >= 2 && tok[0] == 'u' && std::isdigit(static_cast<unsigned char>(tok[1])))
                p = std::max(p, std::atoi(tok.c_str() + 1));
        }
    }
    std::vector<double> row;
    auto parse_row = [&](const std::string& ln) {
        row.clear();
        std::stringstream ss(ln);
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(std::atof(tok.c_str()));
        return static_cast<int>(row.size()) == ncols;
    };
    Sample cur;
    int filled = 0;
    auto start_sample = [&](double t) {
        cur = Sample{};
        cur.t = t;
        cur.x.setZero(N, n);
        cur.d.setZero(N);
        cur.d_hat.setZero(N);
        cur.eps.setZero(N);
        cur.u.setZero(N, p);
        cur.state_margin = Eigen::ArrayXd::Zero(N);
        cur.gain_margin = Eigen::ArrayXd::Zero(N);
        if (obs) {
            cur.v.setZero(N, n);
            cur.z_norm.setZero(N);
        }
        filled = 0;
    };
    bool open = false;
    while (std::getline(traj_csv, line)) {
        if (line.empty()) continue;
        if (!parse_row(line)) throw std::runtime_error("trajectory csv: bad row");
        double t = row[0];
        int agent = static_cast<int>(row[1]) - 1;
        if (!open || agent == 0) {
            if (open) tr.samples.push_back(cur);
            start_sample(t);
            open = true;
        }
        int c = 2;
        for (int j = 0; j < n; ++j) cur.x(agent, j) = row[c++];
        cur.d(agent) = row[c++];
        cur.d_hat(agent) = row[c++];
        cur.eps(agent) = row[c++];
        for (int j = 0; j < p; ++j) cur.u(agent, j) = row[c++];
        if (obs) {
            for (int j = 0; j < n; ++j) cur.v(agent, j) = row[c++];
            ++c; // e repeats d
            cur.z_norm(agent) = row[c++];
        }
        ++filled;
    }
    if (open) tr.samples.push_back(cur);
    tr.event_count.assign(N, 0);
    if (std::getline(events_csv, line)) { // header
        while (std::getline(events_csv, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string t_tok, a_tok, cond;
            std::getline(ss, t_tok, ',');
            std::getline(ss, a_tok, ',');
            std::getline(ss, cond, ',');
            EventRecord ev;
            ev.t = std::atof(t_tok.c_str());
            ev.agent = std::atoi(a_tok.c_str()) - 1;
            ev.condition = cond;
            if (ev.agent >= 0 && ev.agent < N) {
                ++tr.event_count[ev.agent];
                tr.events.push_back(std::move(ev));
            }
        }
    }
    if (!tr.samples.empty()) tr.t_final = tr.samples.back().t;
    return tr;
}

} // namespace etcon
