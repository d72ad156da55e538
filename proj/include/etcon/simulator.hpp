#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "protocol.hpp"

namespace etcon {

struct SimConfig {
    double t_end = 20.0;
    double h = 1e-3;
    double localization_tol = 1e-8;
    int sample_stride = 10;
    long long zeno_event_budget = 1000000;
    double zeno_min_gap = 1e-9;
    std::uint64_t rng_seed = 0;
    double divergence_norm = 1e9;

    void validate() const {
        if (!(h > 0.0)) throw std::invalid_argument("sim: h must be positive");
        if (!(t_end > 0.0)) throw std::invalid_argument("sim: t_end must be positive");
        if (!(t_end >= h)) throw std::invalid_argument("sim: t_end must be at least h");
        if (!(localization_tol > 0.0) || !(localization_tol < h))
            throw std::invalid_argument("sim: localization_tol must lie in (0, h)");
        if (sample_stride < 1) throw std::invalid_argument("sim: sample_stride must be >= 1");
        if (zeno_event_budget < 1) throw std::invalid_argument("sim: zeno_event_budget must be >= 1");
        if (!(zeno_min_gap > 0.0)) throw std::invalid_argument("sim: zeno_min_gap must be positive");
        if (!(divergence_norm > 0.0)) throw std::invalid_argument("sim: divergence_norm must be positive");
    }
};

struct EventRecord {
    double t = 0.0;
    int agent = 0;          // zero-based; reports print agents one-based
    std::string condition;  // state | gain | f1 | f2
    double snapshot_norm = 0.0;
};

enum class RunStatus { ok, zeno, diverged };

inline const char* run_status_name(RunStatus s) {
    switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::zeno: return "zeno";
    case RunStatus::diverged: return "diverged";
    }
    return "?";
}

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<EventRecord> events;
    std::vector<long long> event_count;
    RunStatus status = RunStatus::ok;
    std::string status_detail;
    double t_final = 0.0;
    double max_overshoot = 0.0; // largest margin value seen at a firing
    long long clamped = 0;      // due events deferred by the per-agent minimum gap
};

// Bisection for the first nonnegative point of a continuous margin.
// Requires margin(t_lo) < 0 <= margin(t_hi); the returned time overshoots the
// true crossing by at most tol.
template <class MarginFn>
double localize_event(MarginFn&& margin, double t_lo, double t_hi, double tol) {
    if (!(t_hi > t_lo) || !(tol > 0.0))
        throw std::logic_error("localize_event: bad bracket");
    if (!(margin(t_lo) < 0.0) || !(margin(t_hi) >= 0.0))
        throw std::logic_error("localize_event: margin must cross from negative to nonnegative");
    double lo = t_lo, hi = t_hi;
    for (int it = 0; it < 128 && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        if (margin(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

namespace detail {

struct Rk4Scratch {
    Eigen::VectorXd k1, k2, k3, k4, tmp;
};

template <class Family>
void rk4_step(const Family& fam, const Eigen::VectorXd& S, double hh, Eigen::VectorXd& out,
              Rk4Scratch& w) {
    fam.deriv(S, w.k1);
    w.tmp = S + (0.5 * hh) * w.k1;
    fam.deriv(w.tmp, w.k2);
    w.tmp = S + (0.5 * hh) * w.k2;
    fam.deriv(w.tmp, w.k3);
    w.tmp = S + hh * w.k3;
    fam.deriv(w.tmp, w.k4);
    out = S + (hh / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

inline std::string time_string(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", t);
    return buf;
}

} // namespace detail

// Fixed-step integration on the grid t = k h with event localization between
// grid points. One call is strictly sequential and deterministic: identical
// inputs give a bit-identical trajectory. Events due at the current time fire
// in ascending agent index before the next step is taken; a due event closer
// than localization_tol to the agent's previous one is deferred (counted in
// clamped). Crossings detected at a step's end are localized by bisection on
// a finer internal tolerance so that event times, not just their order, are
// stable under step refinement; the step is then re-taken up to the earliest
// crossing.
template <class Family>
Trajectory simulate(Family& fam, const SimConfig& cfg, const Eigen::MatrixXd& x0,
                    const Eigen::MatrixXd& v0 = Eigen::MatrixXd()) {
    cfg.validate();
    const int N = fam.agents();
    const long long nsteps = std::max<long long>(1, std::llround(cfg.t_end / cfg.h));
    const double refine = std::min(cfg.localization_tol, 1e-13);

    Trajectory tr;
    tr.event_count.assign(N, 0);

    Eigen::VectorXd S;
    fam.init(x0, v0, S);
    Eigen::VectorXd S1(S.size()), Sm(S.size());
    detail::Rk4Scratch w;

    Eigen::VectorXd last_t = Eigen::VectorXd::Zero(N);
    std::vector<int> consec(N, 0);     // consecutive sub-min-gap events
    std::vector<char> up_at_head(N, 0);
    Eigen::ArrayXd ms(N), mg(N), m1(N), m2(N);

    double s = 0.0;
    long long kgrid = 0;

    auto record = [&](double t) {
        Sample smp;
        fam.sample(t, S, last_t, smp);
        tr.samples.push_back(std::move(smp));
    };
    auto finish = [&](RunStatus st, std::string detail) {
        tr.status = st;
        tr.status_detail = std::move(detail);
        tr.t_final = s;
        if (tr.samples.empty() || tr.samples.back().t != s) record(s);
        return tr;
    };

    record(0.0);

    while (kgrid < nsteps) {
        // fire everything due at s; snapshots at t=0 come from init and are
        // not events
        fam.margins(s, S, last_t, ms, mg);
        bool fired = false;
        std::fill(up_at_head.begin(), up_at_head.end(), 0);
        for (int i = 0; i < N; ++i) {
            if (!(ms(i) >= 0.0 || mg(i) >= 0.0)) continue;
            if (tr.event_count[i] > 0 && s - last_t(i) < cfg.localization_tol) {
                ++tr.clamped;
                up_at_head[i] = 1;
                continue;
            }
            double over = std::max(ms(i), mg(i));
            if (over > tr.max_overshoot) tr.max_overshoot = over;
            const char* cond = fam.fire(i, s, S, ms(i), mg(i));
            bool subgap = tr.event_count[i] > 0 && s - last_t(i) < cfg.zeno_min_gap;
            consec[i] = subgap ? consec[i] + 1 : 0;
            last_t(i) = s;
            ++tr.event_count[i];
            tr.events.push_back({s, i, cond, fam.snapshot_norm(i)});
            fired = true;
            if (consec[i] >= 100)
                return finish(RunStatus::zeno,
                              "agent " + std::to_string(i + 1) +
                                  " fired 100 consecutive events below zeno_min_gap near t=" +
                                  detail::time_string(s));
            if (static_cast<long long>(tr.events.size()) > cfg.zeno_event_budget)
                return finish(RunStatus::zeno,
                              "event budget exhausted at t=" + detail::time_string(s));
        }
        if (fired) record(s);

        const double t_next = static_cast<double>(kgrid + 1) * cfg.h;
        const double seg = t_next - s;
        detail::rk4_step(fam, S, seg, S1, w);
        if (!S1.allFinite() || S1.cwiseAbs().maxCoeff() > cfg.divergence_norm)
            return finish(RunStatus::diverged,
                          "state diverged; last valid time t=" + detail::time_string(s));

        fam.margins(t_next, S1, last_t, ms, mg);
        double tau = std::numeric_limits<double>::infinity(); // offset from s
        for (int i = 0; i < N; ++i) {
            if (!(ms(i) >= 0.0 || mg(i) >= 0.0)) continue;
            if (tr.event_count[i] > 0 && t_next - last_t(i) < cfg.localization_tol)
                continue; // still inside the agent's minimum gap for the whole segment
            double off;
            if (up_at_head[i]) {
                // margin was already up at s but the event was deferred; the
                // earliest admissible time is one full gap after the last event
                off = last_t(i) + cfg.localization_tol - s;
            } else {
                double lo = 0.0, hi = seg;
                for (int it = 0; it < 64 && hi - lo > refine; ++it) {
                    double mid = 0.5 * (lo + hi);
                    detail::rk4_step(fam, S, mid, Sm, w);
                    fam.margins(s + mid, Sm, last_t, m1, m2);
                    if (m1(i) >= 0.0 || m2(i) >= 0.0)
                        hi = mid;
                    else
                        lo = mid;
                }
                off = hi;
            }
            if (off < tau) tau = off;
        }

        if (std::isfinite(tau)) {
            // strict progress even when the offset rounds away against s
            double s_next = s + tau;
            if (!(s_next > s))
                s_next = std::nextafter(s, std::numeric_limits<double>::infinity());
            detail::rk4_step(fam, S, s_next - s, S1, w);
            S.swap(S1);
            s = s_next; // due events fire at the next loop head
        } else {
            S.swap(S1);
            s = t_next;
            ++kgrid;
            if (kgrid % cfg.sample_stride == 0 || kgrid == nsteps) record(s);
        }
    }

    tr.status = RunStatus::ok;
    tr.t_final = s;
    return tr;
}

} // namespace etcon
