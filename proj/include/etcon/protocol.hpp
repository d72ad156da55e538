#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "synthesis.hpp"

namespace etcon {

enum class Variant {
    undirected,
    directed,
    leader_follower,
    output_undirected,
    output_directed,
    comparison
};

inline const char* variant_name(Variant v) {
    switch (v) {
    case Variant::undirected: return "undirected";
    case Variant::directed: return "directed";
    case Variant::leader_follower: return "leader_follower";
    case Variant::output_undirected: return "output_undirected";
    case Variant::output_directed: return "output_directed";
    case Variant::comparison: return "comparison";
    }
    return "?";
}

inline bool variant_is_output(Variant v) {
    return v == Variant::output_undirected || v == Variant::output_directed;
}

// Trigger quadratic is Gamma-weighted for the undirected protocols and
// unweighted for the directed/leader-follower ones; the asymmetry is
// deliberate and mirrored in the epsilon dynamics.
inline bool variant_gamma_weighted(Variant v) {
    return v == Variant::undirected || v == Variant::output_undirected;
}

inline bool variant_has_rho(Variant v) {
    return v == Variant::directed || v == Variant::leader_follower ||
           v == Variant::output_directed;
}

struct ProtocolParams {
    Eigen::VectorXd gamma;   // trigger scale per agent
    double theta1 = 1.0;    // gain-trigger envelope
    double theta2 = 1.0;
    Eigen::VectorXd k;       // epsilon decay
    Eigen::VectorXd sigma;   // epsilon forcing
    Eigen::VectorXd eps0;    // epsilon(0)
    Eigen::VectorXd d0;      // adaptive gain start, >= 1
    double mu = 1.0;         // directed damping, in (0, 2)
    // comparison protocol
    Eigen::VectorXd kappa;
    double phi1 = 1.0;
    double phi2 = 1.0;
    Eigen::VectorXd c0;      // > sqrt(2 phi1)
    double mu_rate = 0.25;   // mu1i(t) = mu2i(t) = exp(-mu_rate t)

    static ProtocolParams defaults(int N) {
        ProtocolParams p;
        p.gamma = Eigen::VectorXd::Constant(N, 1.0);
        p.k = Eigen::VectorXd::Constant(N, 0.25);
        p.sigma = Eigen::VectorXd::Constant(N, 0.25);
        p.eps0 = Eigen::VectorXd::Constant(N, 0.4);
        p.d0 = Eigen::VectorXd::Constant(N, 1.0);
        p.kappa = Eigen::VectorXd::Constant(N, 2.0);
        p.c0 = Eigen::VectorXd::Constant(N, 2.0);
        return p;
    }

    void validate(Variant v, int N) const {
        auto positive = [N](const Eigen::VectorXd& w, const char* name) {
            if (w.size() != N) throw std::invalid_argument(std::string("params: ") + name + " size");
            if (w.minCoeff() <= 0) throw std::invalid_argument(std::string("params: ") + name + " must be positive");
        };
        positive(gamma, "gamma");
        positive(k, "k");
        positive(sigma, "sigma");
        positive(eps0, "eps0");
        if (theta1 <= 0 || theta2 <= 0) throw std::invalid_argument("params: theta must be positive");
        if (d0.size() != N || d0.minCoeff() < 1.0)
            throw std::invalid_argument("params: d0 must be >= 1");
        if (variant_has_rho(v) || variant_is_output(v)) {
            if (mu <= 0.0 || mu >= 2.0) throw std::invalid_argument("params: mu must lie in (0, 2)");
        }
        if (v == Variant::comparison) {
            positive(kappa, "kappa");
            if (phi1 <= 0 || phi2 <= 0) throw std::invalid_argument("params: phi must be positive");
            if (mu_rate <= 0) throw std::invalid_argument("params: mu_rate must be positive");
            if (c0.size() != N || c0.minCoeff() <= std::sqrt(2.0 * phi1))
                throw std::invalid_argument("params: c0 must exceed sqrt(2 phi1)");
        }
    }
};

namespace detail {
inline std::vector<std::vector<int>> neighbor_lists(const Graph& g, bool incoming) {
    std::vector<std::vector<int>> out(g.agents());
    for (int i = 0; i < g.agents(); ++i)
        out[i] = incoming ? g.in_neighbors(i) : g.out_neighbors(i);
    return out;
}
} // namespace detail

struct LeaderRoles {
    int leader;
    std::vector<int> informed; // receive the leader's broadcasts directly
};

inline LeaderRoles leader_follower_roles(const Graph& g, int leader = 0) {
    if (leader < 0 || leader >= g.agents())
        throw std::invalid_argument("leader index out of range");
    if (!g.spanning_tree_from(leader))
        throw std::invalid_argument("no spanning tree rooted at the leader");
    return {leader, g.out_neighbors(leader)};
}

// Shared snapshot recording for one recorded instant. Families fill the
// fields they own; the rest stay at their zero size.
struct Sample {
    double t = 0.0;
    Eigen::MatrixXd x;            // N x n true states
    Eigen::VectorXd d;            // adaptive gain (d_i, e_i, or c_i)
    Eigen::VectorXd d_hat;
    Eigen::VectorXd eps;
    Eigen::VectorXd d_bar;        // virtual gain diagnostic
    Eigen::MatrixXd u;            // N x p
    Eigen::ArrayXd state_margin;
    Eigen::ArrayXd gain_margin;
    double xi_norm = 0.0;         // ||(L (x) I) x||
    Eigen::MatrixXd v;            // observer states, when present
    Eigen::VectorXd z_norm;       // ||v_i - x_i||, when present
};

// ---------------------------------------------------------------------------
// State-feedback family: undirected, directed, leader-follower.
// Per-agent continuous block [x(n), d, eps, dbar].
// ---------------------------------------------------------------------------
class StateFeedbackFamily {
public:
    StateFeedbackFamily(Variant v, const Model& m, const GainSet& g, const Graph& graph,
                        const ProtocolParams& par, int leader = 0)
        : v_(v), A_(m.A), B_(m.B), K_(g.K), Gamma_(g.Gamma), Q_(g.Q), graph_(graph),
          par_(par), N_(graph.agents()), n_(static_cast<int>(m.A.rows())),
          p_(static_cast<int>(m.B.cols())),
          in_(detail::neighbor_lists(graph, true)), out_(detail::neighbor_lists(graph, false)),
          gamma_weighted_(variant_gamma_weighted(v)), has_rho_(variant_has_rho(v)),
          leader_(v == Variant::leader_follower ? leader_follower_roles(graph, leader).leader
                                                : -1) {}

    int block() const { return n_ + 3; }
    int flat_size() const { return N_ * block(); }
    bool has_observer() const { return false; }
    int agents() const { return N_; }
    int state_dim() const { return n_; }
    int input_dim() const { return p_; }

    void init(const Eigen::MatrixXd& x0, const Eigen::MatrixXd&, Eigen::VectorXd& S) {
        S.resize(flat_size());
        for (int i = 0; i < N_; ++i) {
            S.segment(i * block(), n_) = x0.row(i).transpose();
            S(i * block() + n_) = par_.d0(i);
            S(i * block() + n_ + 1) = par_.eps0(i);
            S(i * block() + n_ + 2) = par_.d0(i); // dbar(0) = d(0)
        }
        xhat_ = x0;
        dhat_ = par_.d0;
        xihat_.resize(N_, n_);
        rho_ = Eigen::VectorXd::Zero(N_);
        u_ = Eigen::MatrixXd::Zero(N_, p_);
        q_ = Eigen::VectorXd::Zero(N_);
        for (int i = 0; i < N_; ++i) refresh(i);
    }

    void deriv(const Eigen::VectorXd& S, Eigen::VectorXd& dS) const {
        dS.resize(S.size());
        const int b = block();
        for (int i = 0; i < N_; ++i) {
            auto x = S.segment(i * b, n_);
            double eps = S(i * b + n_ + 1);
            dS.segment(i * b, n_) = A_ * x + B_ * u_.row(i).transpose();
            dS(i * b + n_) = q_(i);
            Eigen::VectorXd xt = xhat_.row(i).transpose() - x;
            double quad = gamma_weighted_ ? xt.dot(Gamma_ * xt) : xt.squaredNorm();
            dS(i * b + n_ + 1) = -par_.k(i) * eps - par_.sigma(i) * quad;
            Eigen::VectorXd xi = true_xi(S, i);
            dS(i * b + n_ + 2) = xi.dot(Gamma_ * xi);
        }
    }

    void margins(double t, const Eigen::VectorXd& S, const Eigen::VectorXd& last_t,
                 Eigen::ArrayXd& ms, Eigen::ArrayXd& mg) const {
        const int b = block();
        ms.resize(N_);
        mg.resize(N_);
        for (int i = 0; i < N_; ++i) {
            auto x = S.segment(i * b, n_);
            Eigen::VectorXd xt = xhat_.row(i).transpose() - x;
            double quad = gamma_weighted_ ? xt.dot(Gamma_ * xt) : xt.squaredNorm();
            ms(i) = quad - par_.gamma(i) * S(i * b + n_ + 1);
            if (i == leader_) {
                mg(i) = -std::numeric_limits<double>::infinity();
            } else {
                double dt_ = dhat_(i) - S(i * b + n_);
                mg(i) = std::abs(dt_) -
                        par_.theta1 * std::exp(-par_.theta2 * (t - last_t(i)));
            }
        }
    }

    const char* fire(int i, double /*t*/, const Eigen::VectorXd& S, double ms_i, double mg_i) {
        const int b = block();
        xhat_.row(i) = S.segment(i * b, n_).transpose();
        dhat_(i) = S(i * b + n_);
        refresh(i);
        for (int j : out_[i]) refresh(j);
        return ms_i >= mg_i ? "state" : "gain";
    }

    void sample(double t, const Eigen::VectorXd& S, const Eigen::VectorXd& last_t,
                Sample& out) const {
        const int b = block();
        out.t = t;
        out.x.resize(N_, n_);
        out.d.resize(N_);
        out.eps.resize(N_);
        out.d_bar.resize(N_);
        for (int i = 0; i < N_; ++i) {
            out.x.row(i) = S.segment(i * b, n_).transpose();
            out.d(i) = S(i * b + n_);
            out.eps(i) = S(i * b + n_ + 1);
            out.d_bar(i) = S(i * b + n_ + 2);
        }
        out.d_hat = dhat_;
        out.u = u_;
        margins(t, S, last_t, out.state_margin, out.gain_margin);
        out.xi_norm = std::sqrt((graph_.laplacian() * out.x).squaredNorm());
    }

    const Eigen::MatrixXd& control() const { return u_; }
    double snapshot_norm(int i) const { return xhat_.row(i).norm(); }
    int leader() const { return leader_; }

private:
    Eigen::VectorXd true_xi(const Eigen::VectorXd& S, int i) const {
        const int b = block();
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(n_);
        auto xi_self = S.segment(i * b, n_);
        for (int j : in_[i]) xi += xi_self - S.segment(j * b, n_);
        return xi;
    }

    void refresh(int j) {
        Eigen::VectorXd xih = Eigen::VectorXd::Zero(n_);
        for (int k : in_[j]) xih += xhat_.row(j).transpose() - xhat_.row(k).transpose();
        xihat_.row(j) = xih.transpose();
        if (v_ == Variant::leader_follower && j == leader_) {
            q_(j) = 0.0;
            u_.row(j).setZero();
            return;
        }
        q_(j) = xih.dot(Gamma_ * xih);
        if (has_rho_) {
            rho_(j) = xih.dot(Q_ * xih);
            u_.row(j) = ((dhat_(j) + rho_(j)) * par_.mu * (K_ * xih)).transpose();
        } else {
            u_.row(j) = (dhat_(j) * (K_ * xih)).transpose();
        }
    }

    Variant v_;
    Eigen::MatrixXd A_, B_, K_, Gamma_, Q_;
    const Graph& graph_;
    ProtocolParams par_;
    int N_, n_, p_;
    std::vector<std::vector<int>> in_, out_;
    bool gamma_weighted_, has_rho_;
    int leader_;

    Eigen::MatrixXd xhat_;  // broadcast snapshots
    Eigen::VectorXd dhat_;
    Eigen::MatrixXd xihat_; // broadcast consensus errors
    Eigen::VectorXd rho_;
    Eigen::MatrixXd u_;     // cached inputs, piecewise constant
    Eigen::VectorXd q_;     // cached d-integrands
};

// ---------------------------------------------------------------------------
// Observer family: output_undirected, output_directed.
// Per-agent continuous block [x(n), v(n), e, eps, ebar].
// ---------------------------------------------------------------------------
class ObserverFamily {
public:
    ObserverFamily(Variant v, const Model& m, const GainSet& g, const Graph& graph,
                   const ProtocolParams& par)
        : v_(v), A_(m.A), B_(m.B), C_(m.C), F_(g.F), K_(g.K), Gamma_(g.Gamma), Q_(g.Q),
          FC_(g.F * m.C), graph_(graph), par_(par), N_(graph.agents()),
          n_(static_cast<int>(m.A.rows())), p_(static_cast<int>(m.B.cols())),
          in_(detail::neighbor_lists(graph, true)), out_(detail::neighbor_lists(graph, false)),
          gamma_weighted_(variant_gamma_weighted(v)) {}

    int block() const { return 2 * n_ + 3; }
    int flat_size() const { return N_ * block(); }
    bool has_observer() const { return true; }
    int agents() const { return N_; }
    int state_dim() const { return n_; }
    int input_dim() const { return p_; }

    void init(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& v0, Eigen::VectorXd& S) {
        S.resize(flat_size());
        for (int i = 0; i < N_; ++i) {
            S.segment(i * block(), n_) = x0.row(i).transpose();
            S.segment(i * block() + n_, n_) = v0.row(i).transpose();
            S(i * block() + 2 * n_) = par_.d0(i);
            S(i * block() + 2 * n_ + 1) = par_.eps0(i);
            S(i * block() + 2 * n_ + 2) = par_.d0(i);
        }
        vhat_ = v0;
        ehat_ = par_.d0;
        etahat_.resize(N_, n_);
        varrho_ = Eigen::VectorXd::Zero(N_);
        u_ = Eigen::MatrixXd::Zero(N_, p_);
        q_ = Eigen::VectorXd::Zero(N_);
        for (int i = 0; i < N_; ++i) refresh(i);
    }

    void deriv(const Eigen::VectorXd& S, Eigen::VectorXd& dS) const {
        dS.resize(S.size());
        const int b = block();
        for (int i = 0; i < N_; ++i) {
            auto x = S.segment(i * b, n_);
            auto v = S.segment(i * b + n_, n_);
            double eps = S(i * b + 2 * n_ + 1);
            Eigen::VectorXd Bu = B_ * u_.row(i).transpose();
            dS.segment(i * b, n_) = A_ * x + Bu;
            dS.segment(i * b + n_, n_) = A_ * v + Bu + FC_ * (v - x);
            dS(i * b + 2 * n_) = q_(i);
            Eigen::VectorXd vt = vhat_.row(i).transpose() - v;
            double quad = gamma_weighted_ ? vt.dot(Gamma_ * vt) : vt.squaredNorm();
            dS(i * b + 2 * n_ + 1) = -par_.k(i) * eps - par_.sigma(i) * quad;
            Eigen::VectorXd eta = true_eta(S, i);
            dS(i * b + 2 * n_ + 2) = eta.dot(Gamma_ * eta);
        }
    }

    void margins(double t, const Eigen::VectorXd& S, const Eigen::VectorXd& last_t,
                 Eigen::ArrayXd& ms, Eigen::ArrayXd& mg) const {
        const int b = block();
        ms.resize(N_);
        mg.resize(N_);
        for (int i = 0; i < N_; ++i) {
            auto v = S.segment(i * b + n_, n_);
            Eigen::VectorXd vt = vhat_.row(i).transpose() - v;
            double quad = gamma_weighted_ ? vt.dot(Gamma_ * vt) : vt.squaredNorm();
            ms(i) = quad - par_.gamma(i) * S(i * b + 2 * n_ + 1);
            double et = ehat_(i) - S(i * b + 2 * n_);
            mg(i) = std::abs(et) - par_.theta1 * std::exp(-par_.theta2 * (t - last_t(i)));
        }
    }

    const char* fire(int i, double /*t*/, const Eigen::VectorXd& S, double ms_i, double mg_i) {
        const int b = block();
        vhat_.row(i) = S.segment(i * b + n_, n_).transpose();
        ehat_(i) = S(i * b + 2 * n_);
        refresh(i);
        for (int j : out_[i]) refresh(j);
        return ms_i >= mg_i ? "state" : "gain";
    }

    void sample(double t, const Eigen::VectorXd& S, const Eigen::VectorXd& last_t,
                Sample& out) const {
        const int b = block();
        out.t = t;
        out.x.resize(N_, n_);
        out.v.resize(N_, n_);
        out.d.resize(N_);
        out.eps.resize(N_);
        out.d_bar.resize(N_);
        out.z_norm.resize(N_);
        for (int i = 0; i < N_; ++i) {
            out.x.row(i) = S.segment(i * b, n_).transpose();
            out.v.row(i) = S.segment(i * b + n_, n_).transpose();
            out.d(i) = S(i * b + 2 * n_);
            out.eps(i) = S(i * b + 2 * n_ + 1);
            out.d_bar(i) = S(i * b + 2 * n_ + 2);
            out.z_norm(i) = (out.v.row(i) - out.x.row(i)).norm();
        }
        out.d_hat = ehat_;
        out.u = u_;
        margins(t, S, last_t, out.state_margin, out.gain_margin);
        out.xi_norm = std::sqrt((graph_.laplacian() * out.x).squaredNorm());
    }

    const Eigen::MatrixXd& control() const { return u_; }
    double snapshot_norm(int i) const { return vhat_.row(i).norm(); }
    int leader() const { return -1; }

private:
    Eigen::VectorXd true_eta(const Eigen::VectorXd& S, int i) const {
        const int b = block();
        Eigen::VectorXd eta = Eigen::VectorXd::Zero(n_);
        auto v_self = S.segment(i * b + n_, n_);
        for (int j : in_[i]) eta += v_self - S.segment(j * b + n_, n_);
        return eta;
    }

    void refresh(int j) {
        Eigen::VectorXd eh = Eigen::VectorXd::Zero(n_);
        for (int k : in_[j]) eh += vhat_.row(j).transpose() - vhat_.row(k).transpose();
        etahat_.row(j) = eh.transpose();
        q_(j) = eh.dot(Gamma_ * eh);
        if (v_ == Variant::output_directed) {
            varrho_(j) = eh.dot(Q_ * eh);
            u_.row(j) = ((ehat_(j) + varrho_(j)) * par_.mu * (K_ * eh)).transpose();
        } else {
            u_.row(j) = (ehat_(j) * (K_ * eh)).transpose();
        }
    }

    Variant v_;
    Eigen::MatrixXd A_, B_, C_, F_, K_, Gamma_, Q_, FC_;
    const Graph& graph_;
    ProtocolParams par_;
    int N_, n_, p_;
    std::vector<std::vector<int>> in_, out_;
    bool gamma_weighted_;

    Eigen::MatrixXd vhat_;
    Eigen::VectorXd ehat_;
    Eigen::MatrixXd etahat_;
    Eigen::VectorXd varrho_;
    Eigen::MatrixXd u_;
    Eigen::VectorXd q_;
};

// ---------------------------------------------------------------------------
// Comparison family: sampled relative-state protocol.
// Per-agent continuous block [x(n), c]. Events sample the true relative
// state, so they touch only the firing agent.
// ---------------------------------------------------------------------------
class ComparisonFamily {
public:
    ComparisonFamily(Variant, const Model& m, const GainSet& g, const Graph& graph,
                     const ProtocolParams& par)
        : A_(m.A), B_(m.B), K_(g.K), Gamma_(g.Gamma), Q_(g.Q), graph_(graph), par_(par),
          N_(graph.agents()), n_(static_cast<int>(m.A.rows())),
          p_(static_cast<int>(m.B.cols())), in_(detail::neighbor_lists(graph, true)) {}

    int block() const { return n_ + 1; }
    int flat_size() const { return N_ * block(); }
    bool has_observer() const { return false; }
    int agents() const { return N_; }
    int state_dim() const { return n_; }
    int input_dim() const { return p_; }

    void init(const Eigen::MatrixXd& x0, const Eigen::MatrixXd&, Eigen::VectorXd& S) {
        S.resize(flat_size());
        for (int i = 0; i < N_; ++i) {
            S.segment(i * block(), n_) = x0.row(i).transpose();
            S(i * block() + n_) = par_.c0(i);
        }
        xihat_.resize(N_, n_);
        chat_ = par_.c0;
        rhohat_ = Eigen::VectorXd::Zero(N_);
        qhat_ = Eigen::VectorXd::Zero(N_);
        u_ = Eigen::MatrixXd::Zero(N_, p_);
        q_ = Eigen::VectorXd::Zero(N_);
        for (int i = 0; i < N_; ++i) {
            Eigen::VectorXd xi = true_xi(S, i);
            resample(i, xi, par_.c0(i));
        }
    }

    void deriv(const Eigen::VectorXd& S, Eigen::VectorXd& dS) const {
        dS.resize(S.size());
        const int b = block();
        for (int i = 0; i < N_; ++i) {
            auto x = S.segment(i * b, n_);
            dS.segment(i * b, n_) = A_ * x + B_ * u_.row(i).transpose();
            dS(i * b + n_) = q_(i);
        }
    }

    void margins(double t, const Eigen::VectorXd& S, const Eigen::VectorXd&,
                 Eigen::ArrayXd& f1, Eigen::ArrayXd& f2) const {
        const int b = block();
        f1.resize(N_);
        f2.resize(N_);
        const double mu_t = std::exp(-par_.mu_rate * t);
        for (int i = 0; i < N_; ++i) {
            Eigen::VectorXd xi = true_xi(S, i);
            double c = S(i * b + n_);
            double rho = xi.dot(Q_ * xi);
            double xiG = xi.dot(Gamma_ * xi);
            Eigen::VectorXd xit = xihat_.row(i).transpose() - xi;
            double a1 = c + rho;
            f1(i) = a1 * a1 * xit.dot(Gamma_ * xit) - par_.phi1 * xiG - mu_t;
            double a2 = (chat_(i) - c) + (rhohat_(i) - rho);
            f2(i) = a2 * a2 * qhat_(i) - par_.phi2 * xiG - mu_t;
        }
    }

    const char* fire(int i, double /*t*/, const Eigen::VectorXd& S, double f1_i, double f2_i) {
        Eigen::VectorXd xi = true_xi(S, i);
        resample(i, xi, S(i * block() + n_));
        return f1_i >= f2_i ? "f1" : "f2";
    }

    void sample(double t, const Eigen::VectorXd& S, const Eigen::VectorXd& last_t,
                Sample& out) const {
        const int b = block();
        out.t = t;
        out.x.resize(N_, n_);
        out.d.resize(N_);
        for (int i = 0; i < N_; ++i) {
            out.x.row(i) = S.segment(i * b, n_).transpose();
            out.d(i) = S(i * b + n_);
        }
        out.d_hat = chat_;
        out.eps = Eigen::VectorXd::Zero(N_);
        out.d_bar = Eigen::VectorXd::Zero(N_);
        out.u = u_;
        margins(t, S, last_t, out.state_margin, out.gain_margin);
        out.xi_norm = std::sqrt((graph_.laplacian() * out.x).squaredNorm());
    }

    const Eigen::MatrixXd& control() const { return u_; }
    double snapshot_norm(int i) const { return xihat_.row(i).norm(); }
    int leader() const { return -1; }

private:
    Eigen::VectorXd true_xi(const Eigen::VectorXd& S, int i) const {
        const int b = block();
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(n_);
        auto x_self = S.segment(i * b, n_);
        for (int j : in_[i]) xi += x_self - S.segment(j * b, n_);
        return xi;
    }

    void resample(int i, const Eigen::VectorXd& xi, double c_now) {
        xihat_.row(i) = xi.transpose();
        chat_(i) = c_now;
        rhohat_(i) = xi.dot(Q_ * xi);
        qhat_(i) = xi.dot(Gamma_ * xi);
        q_(i) = par_.kappa(i) * qhat_(i);
        u_.row(i) = ((chat_(i) + rhohat_(i)) * (K_ * xi)).transpose();
    }

    Eigen::MatrixXd A_, B_, K_, Gamma_, Q_;
    const Graph& graph_;
    ProtocolParams par_;
    int N_, n_, p_;
    std::vector<std::vector<int>> in_;

    Eigen::MatrixXd xihat_; // xi_i(t_k^i)
    Eigen::VectorXd chat_, rhohat_, qhat_;
    Eigen::MatrixXd u_;
    Eigen::VectorXd q_;
};

} // namespace etcon
