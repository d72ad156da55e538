#include <catch2/catch_amalgamated.hpp>
#include <etcon/protocol.hpp>

using namespace etcon;
using Catch::Approx;

namespace {
// scalar-state model with hand-picked gains so every quantity is computable
// by inspection
Model scalar_model() {
    Model m;
    m.A = Eigen::MatrixXd::Zero(1, 1);
    m.B = Eigen::MatrixXd::Ones(1, 1);
    m.C = Eigen::MatrixXd::Ones(1, 1);
    return m;
}

GainSet scalar_gains(double K, double Gamma, double Q, double F = 0.0) {
    GainSet g;
    g.K = Eigen::MatrixXd::Constant(1, 1, K);
    g.Gamma = Eigen::MatrixXd::Constant(1, 1, Gamma);
    g.Q = Eigen::MatrixXd::Constant(1, 1, Q);
    g.P = g.Q.inverse();
    if (F != 0.0) g.F = Eigen::MatrixXd::Constant(1, 1, F);
    return g;
}
} // namespace

TEST_CASE("parameter validation") {
    ProtocolParams p = ProtocolParams::defaults(2);
    for (Variant v : {Variant::undirected, Variant::directed, Variant::leader_follower,
                      Variant::output_undirected, Variant::output_directed,
                      Variant::comparison})
        CHECK_NOTHROW(p.validate(v, 2));

    ProtocolParams bad_mu = p;
    bad_mu.mu = 2.5;
    CHECK_NOTHROW(bad_mu.validate(Variant::undirected, 2)); // mu unused there
    CHECK_THROWS_AS(bad_mu.validate(Variant::directed, 2), std::invalid_argument);
    CHECK_THROWS_AS(bad_mu.validate(Variant::output_undirected, 2), std::invalid_argument);

    ProtocolParams bad_d0 = p;
    bad_d0.d0(1) = 0.5;
    CHECK_THROWS_AS(bad_d0.validate(Variant::undirected, 2), std::invalid_argument);

    ProtocolParams bad_c0 = p;
    bad_c0.c0.setConstant(1.0); // need c0 > sqrt(2 phi1) = sqrt(2)
    CHECK_NOTHROW(bad_c0.validate(Variant::directed, 2));
    CHECK_THROWS_AS(bad_c0.validate(Variant::comparison, 2), std::invalid_argument);

    ProtocolParams bad_size = p;
    bad_size.gamma.resize(3);
    bad_size.gamma.setConstant(1.0);
    CHECK_THROWS_AS(bad_size.validate(Variant::undirected, 2), std::invalid_argument);
}

TEST_CASE("leader roles") {
    Graph chain(3, {{0, 1}, {1, 2}}, false);
    LeaderRoles r = leader_follower_roles(chain, 0);
    CHECK(r.leader == 0);
    CHECK(r.informed == std::vector<int>{1});
    CHECK_THROWS_AS(leader_follower_roles(chain, 2), std::invalid_argument);
    CHECK_THROWS_AS(leader_follower_roles(chain, 5), std::invalid_argument);
}

TEST_CASE("undirected family closed-form quantities") {
    Model m = scalar_model();
    GainSet g = scalar_gains(-1.0, 1.0, 1.0);
    Graph graph(2, {{0, 1}}, true);
    ProtocolParams par = ProtocolParams::defaults(2);
    StateFeedbackFamily fam(Variant::undirected, m, g, graph, par);

    CHECK(fam.block() == 4);
    CHECK(fam.flat_size() == 8);
    CHECK_FALSE(fam.has_observer());

    Eigen::MatrixXd x0(2, 1);
    x0 << 1, -1;
    Eigen::VectorXd S;
    fam.init(x0, {}, S);

    // xi_hat_1 = x1 - x2 = 2, so u = d0 K xi_hat
    CHECK(fam.control()(0, 0) == Approx(-2.0));
    CHECK(fam.control()(1, 0) == Approx(2.0));
    CHECK(fam.snapshot_norm(0) == Approx(1.0));

    Eigen::VectorXd dS;
    fam.deriv(S, dS);
    CHECK(dS(0) == Approx(-2.0));  // dx = Bu
    CHECK(dS(1) == Approx(4.0));   // dd = xi_hat' Gamma xi_hat
    CHECK(dS(2) == Approx(-0.1));  // deps = -k eps, sampling error zero
    CHECK(dS(3) == Approx(4.0));   // dbar integrates the true xi quadratic

    Eigen::VectorXd last_t = Eigen::VectorXd::Zero(2);
    Eigen::ArrayXd ms, mg;
    fam.margins(0.0, S, last_t, ms, mg);
    CHECK(ms(0) == Approx(-0.4)); // -gamma eps0
    CHECK(mg(0) == Approx(-1.0)); // -theta1

    Sample smp;
    fam.sample(0.0, S, last_t, smp);
    CHECK(smp.xi_norm == Approx(2.0 * std::sqrt(2.0)));
    CHECK(smp.d(0) == 1.0);
    CHECK(smp.v.size() == 0);
}

TEST_CASE("trigger weighting differs between undirected and directed") {
    Model m;
    m.A = Eigen::MatrixXd::Zero(2, 2);
    m.B = Eigen::MatrixXd::Identity(2, 2);
    GainSet g;
    g.K = -Eigen::MatrixXd::Identity(2, 2);
    g.Gamma.resize(2, 2);
    g.Gamma << 4, 0, 0, 1;
    g.Q = Eigen::MatrixXd::Identity(2, 2);
    ProtocolParams par = ProtocolParams::defaults(2);

    Graph und(2, {{0, 1}}, true);
    Graph cyc(2, {{0, 1}, {1, 0}}, false);
    StateFeedbackFamily fu(Variant::undirected, m, g, und, par);
    StateFeedbackFamily fd(Variant::directed, m, g, cyc, par);

    Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(2, 2);
    Eigen::VectorXd Su, Sd;
    fu.init(x0, {}, Su);
    fd.init(x0, {}, Sd);
    // drift agent 1 so its sampling error is (1, 0)
    Su(0) = -1.0;
    Sd(0) = -1.0;

    Eigen::VectorXd last_t = Eigen::VectorXd::Zero(2);
    Eigen::ArrayXd ms, mg;
    fu.margins(0.0, Su, last_t, ms, mg);
    CHECK(ms(0) == Approx(4.0 - 0.4)); // Gamma-weighted
    fd.margins(0.0, Sd, last_t, ms, mg);
    CHECK(ms(0) == Approx(1.0 - 0.4)); // plain norm

    Eigen::VectorXd dSu, dSd;
    fu.deriv(Su, dSu);
    fd.deriv(Sd, dSd);
    const int eps_at = 2 + 1; // block [x(2), d, eps, dbar]
    CHECK(dSu(eps_at) == Approx(-0.25 * 0.4 - 0.25 * 4.0));
    CHECK(dSd(eps_at) == Approx(-0.25 * 0.4 - 0.25 * 1.0));
}

TEST_CASE("directed control law includes the quadratic correction") {
    Model m = scalar_model();
    GainSet g = scalar_gains(-1.0, 1.0, 2.0);
    Graph cyc(2, {{0, 1}, {1, 0}}, false);
    ProtocolParams par = ProtocolParams::defaults(2);
    par.mu = 0.5;
    StateFeedbackFamily fam(Variant::directed, m, g, cyc, par);
    Eigen::MatrixXd x0(2, 1);
    x0 << 1, -1;
    Eigen::VectorXd S;
    fam.init(x0, {}, S);
    // xi_hat = 2, rho = xi' Q xi = 8, u = (d + rho) mu K xi_hat
    CHECK(fam.control()(0, 0) == Approx((1.0 + 8.0) * 0.5 * -2.0));
}

TEST_CASE("events refresh the firing agent and its out-neighbors only") {
    Model m = scalar_model();
    GainSet g = scalar_gains(-1.0, 1.0, 1.0);
    Graph chain(3, {{0, 1}, {1, 2}}, false);
    ProtocolParams par = ProtocolParams::defaults(3);
    StateFeedbackFamily fam(Variant::directed, m, g, chain, par);
    Eigen::MatrixXd x0(3, 1);
    x0 << 1, 0, 0;
    Eigen::VectorXd S;
    fam.init(x0, {}, S);
    CHECK(fam.control()(0, 0) == 0.0);               // no in-neighbors
    CHECK(fam.control()(1, 0) == Approx(2.0));       // xi_hat = -1, rho = 1
    CHECK(fam.control()(2, 0) == 0.0);

    S(0) = 5.0; // agent 1 drifts, then fires
    CHECK(std::string(fam.fire(0, 0.1, S, 0.1, 0.0)) == "state");
    CHECK(fam.snapshot_norm(0) == Approx(5.0));
    CHECK(fam.control()(1, 0) == Approx((1.0 + 25.0) * 5.0)); // xi_hat = -5
    CHECK(fam.control()(2, 0) == 0.0); // agent 3 not an out-neighbor of 1

    S(4) = 3.0; // agent 2 state (block 4, offset 0)
    CHECK(std::string(fam.fire(1, 0.2, S, -0.3, 0.2)) == "gain");
    CHECK(fam.control()(2, 0) == Approx((1.0 + 9.0) * 3.0)); // xi_hat = -3
}

TEST_CASE("leader runs open loop") {
    Model m = scalar_model();
    GainSet g = scalar_gains(-1.0, 1.0, 1.0);
    Graph chain(3, {{0, 1}, {1, 2}}, false);
    ProtocolParams par = ProtocolParams::defaults(3);
    StateFeedbackFamily fam(Variant::leader_follower, m, g, chain, par);
    CHECK(fam.leader() == 0);

    Eigen::MatrixXd x0(3, 1);
    x0 << 2, 0, 0;
    Eigen::VectorXd S;
    fam.init(x0, {}, S);
    CHECK(fam.control()(0, 0) == 0.0);
    CHECK(fam.control()(1, 0) == Approx((1.0 + 4.0) * 2.0)); // xi_hat = -2, rho = 4

    Eigen::VectorXd dS;
    fam.deriv(S, dS);
    CHECK(dS(0) == 0.0); // leader state drifts with A alone
    CHECK(dS(1) == 0.0); // leader gain frozen

    Eigen::VectorXd last_t = Eigen::VectorXd::Zero(3);
    Eigen::ArrayXd ms, mg;
    fam.margins(0.0, S, last_t, ms, mg);
    CHECK(mg(0) == -std::numeric_limits<double>::infinity());
    CHECK(std::isfinite(mg(1)));

    fam.fire(0, 0.1, S, 0.1, -1.0);
    CHECK(fam.control()(0, 0) == 0.0); // firing never gives the leader an input
}

TEST_CASE("observer family dynamics and snapshots") {
    Model m = scalar_model();
    GainSet g = scalar_gains(-1.0, 1.0, 1.0, -2.0);
    Graph graph(2, {{0, 1}}, true);
    ProtocolParams par = ProtocolParams::defaults(2);
    ObserverFamily fam(Variant::output_undirected, m, g, graph, par);
    CHECK(fam.block() == 5);
    CHECK(fam.has_observer());

    Eigen::MatrixXd x0(2, 1), v0 = Eigen::MatrixXd::Zero(2, 1);
    x0 << 1, -1;
    Eigen::VectorXd S;
    fam.init(x0, v0, S);
    CHECK(fam.control().cwiseAbs().maxCoeff() == 0.0); // estimates start equal

    Eigen::VectorXd dS;
    fam.deriv(S, dS);
    CHECK(dS(0) == 0.0);            // dx = Ax + Bu = 0
    CHECK(dS(1) == Approx(2.0));    // dv = FC (v - x) = -2 (0 - 1)
    CHECK(dS(5 + 1) == Approx(-2.0));
    CHECK(dS(2) == 0.0);            // de = eta_hat quadratic = 0
    CHECK(dS(3) == Approx(-0.1));   // deps

    Eigen::VectorXd last_t = Eigen::VectorXd::Zero(2);
    Sample smp;
    fam.sample(0.0, S, last_t, smp);
    CHECK(smp.z_norm(0) == Approx(1.0));
    CHECK(smp.z_norm(1) == Approx(1.0));
    CHECK(smp.v.rows() == 2);

    // estimate drifts, then the agent fires: snapshot and input refresh
    S(1) = 0.5;
    fam.fire(0, 0.1, S, 0.1, 0.0);
    CHECK(fam.snapshot_norm(0) == Approx(0.5));
    CHECK(fam.control()(0, 0) == Approx(-0.5)); // e_hat K eta_hat = 1 * -1 * 0.5
}

TEST_CASE("directed observer control law") {
    Model m = scalar_model();
    GainSet g = scalar_gains(-1.0, 1.0, 1.0, -2.0);
    Graph cyc(2, {{0, 1}, {1, 0}}, false);
    ProtocolParams par = ProtocolParams::defaults(2);
    par.mu = 0.5;
    ObserverFamily fam(Variant::output_directed, m, g, cyc, par);
    Eigen::MatrixXd x0(2, 1), v0(2, 1);
    x0 << 1, -1;
    v0 << 1, -1; // estimates start on the states
    Eigen::VectorXd S;
    fam.init(x0, v0, S);
    // eta_hat = 2, correction = eta' Q eta = 4
    CHECK(fam.control()(0, 0) == Approx((1.0 + 4.0) * 0.5 * -2.0));
}

TEST_CASE("comparison family samples true relative states") {
    Model m = scalar_model();
    GainSet g = scalar_gains(-1.0, 1.0, 1.0);
    Graph cyc(2, {{0, 1}, {1, 0}}, false);
    ProtocolParams par = ProtocolParams::defaults(2);
    ComparisonFamily fam(Variant::comparison, m, g, cyc, par);
    CHECK(fam.block() == 2);

    Eigen::MatrixXd x0(2, 1);
    x0 << 1, -1;
    Eigen::VectorXd S;
    fam.init(x0, {}, S);
    // xi = 2, rho = 4, u = (c0 + rho) K xi
    CHECK(fam.control()(0, 0) == Approx(-12.0));
    CHECK(fam.snapshot_norm(0) == Approx(2.0));

    Eigen::VectorXd dS;
    fam.deriv(S, dS);
    CHECK(dS(1) == Approx(8.0)); // dc = kappa xi_hat' Gamma xi_hat

    Eigen::VectorXd last_t = Eigen::VectorXd::Zero(2);
    Eigen::ArrayXd f1, f2;
    fam.margins(0.0, S, last_t, f1, f2);
    CHECK(f1(0) == Approx(-5.0)); // sampling error zero: -phi1 xi'G xi - 1
    CHECK(f2(0) == Approx(-5.0));

    // let c drift; only f2 reacts
    S(1) = 3.0;
    fam.margins(0.0, S, last_t, f1, f2);
    CHECK(f1(0) == Approx(-5.0));
    CHECK(f2(0) == Approx(-1.0)); // (c_hat - c)^2 q_hat - phi2 xi'G xi - 1

    CHECK(std::string(fam.fire(0, 0.0, S, f1(0), f2(0))) == "f2");
    CHECK(fam.control()(0, 0) == Approx((3.0 + 4.0) * -2.0));
    fam.margins(0.0, S, last_t, f1, f2);
    CHECK(f2(0) == Approx(-5.0)); // resampled, error gone
}
