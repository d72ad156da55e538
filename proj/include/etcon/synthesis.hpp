#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>

namespace etcon {

struct Model {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C; // empty unless output feedback
};

enum class SynthesisMode { state_feedback_lmi, state_feedback_care, output_feedback };

struct GainSet {
    Eigen::MatrixXd Q;     // Riccati solution, A'Q + QA - QBB'Q + I = 0
    Eigen::MatrixXd P;     // Q^-1, satisfies AP + PA' - BB' = -PP < 0
    Eigen::MatrixXd K;     // -B'Q
    Eigen::MatrixXd Gamma; // QBB'Q
    Eigen::MatrixXd F;     // observer gain, empty in state-feedback modes
};

[[nodiscard]] inline bool is_hurwitz(const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    return es.eigenvalues().real().maxCoeff() < -1e-10;
}

// Hautus test: rank [A - lambda I, B] full for every eigenvalue with
// Re(lambda) >= 0, at tolerance 1e-9 relative to the largest singular value.
[[nodiscard]] inline bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    const int n = static_cast<int>(A.rows());
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    for (int k = 0; k < n; ++k) {
        std::complex<double> lam = es.eigenvalues()(k);
        if (lam.real() < -1e-12) continue;
        Eigen::MatrixXcd M(n, n + B.cols());
        M << A.cast<std::complex<double>>() - lam * Eigen::MatrixXcd::Identity(n, n),
            B.cast<std::complex<double>>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
        if (svd.singularValues()(n - 1) <= 1e-9 * svd.singularValues()(0)) return false;
    }
    return true;
}

[[nodiscard]] inline bool is_detectable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
    return is_stabilizable(A.transpose(), C.transpose());
}

// Solves M'X + XM = W by column-major Kronecker vectorization.
inline Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& M, const Eigen::MatrixXd& W) {
    const int n = static_cast<int>(M.rows());
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n * n, n * n);
    // vec(M'X) = (I (x) M') vec(X), vec(XM) = (M' (x) I) vec(X)
    for (int c = 0; c < n; ++c)
        big.block(c * n, c * n, n, n) += M.transpose();
    for (int bc = 0; bc < n; ++bc)
        for (int br = 0; br < n; ++br)
            if (M(bc, br) != 0.0) // (M')_{br,bc}
                big.block(br * n, bc * n, n, n) +=
                    M(bc, br) * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(W.data(), n * n);
    Eigen::VectorXd x = big.partialPivLu().solve(w);
    return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
}

// Stabilizing solution of A'Q + QA - QBB'Q + I = 0 via the stable invariant
// subspace of the Hamiltonian, refined with one Newton step.
inline Eigen::MatrixXd solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd H(2 * n, 2 * n);
    H << A, -B * B.transpose(), -Eigen::MatrixXd::Identity(n, n), -A.transpose();
    Eigen::EigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("care: eigensolver failed");
    Eigen::MatrixXcd U(2 * n, n);
    int taken = 0;
    for (int k = 0; k < 2 * n && taken < n; ++k) {
        if (es.eigenvalues()(k).real() < 0.0)
            U.col(taken++) = es.eigenvectors().col(k);
    }
    if (taken != n)
        throw std::runtime_error("care: Hamiltonian has no n-dimensional stable subspace "
                                 "(pair not stabilizable?)");
    Eigen::MatrixXcd U1 = U.topRows(n);
    Eigen::MatrixXcd U2 = U.bottomRows(n);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(U1);
    if (!lu.isInvertible())
        throw std::runtime_error("care: stable subspace basis singular");
    Eigen::MatrixXd Q = (U2 * lu.inverse()).real();
    Q = 0.5 * (Q + Q.transpose());
    // Newton step: Acl'Q1 + Q1 Acl = -(I + Q BB' Q) with Acl = A - BB'Q
    Eigen::MatrixXd BBt = B * B.transpose();
    Eigen::MatrixXd Acl = A - BBt * Q;
    Eigen::MatrixXd rhs = -(Eigen::MatrixXd::Identity(n, n) + Q * BBt * Q);
    Q = solve_lyapunov(Acl, rhs);
    Q = 0.5 * (Q + Q.transpose());
    Eigen::MatrixXd resid = A.transpose() * Q + Q * A - Q * BBt * Q +
                            Eigen::MatrixXd::Identity(n, n);
    if (resid.norm() > 1e-8 * (1.0 + Q.squaredNorm()))
        throw std::runtime_error("care: residual too large");
    if (!is_hurwitz(A - BBt * Q))
        throw std::runtime_error("care: closed loop not Hurwitz");
    return Q;
}

inline void validate_model(const Model& m, SynthesisMode mode) {
    if (m.A.rows() != m.A.cols()) throw std::invalid_argument("model: A not square");
    if (m.B.rows() != m.A.rows()) throw std::invalid_argument("model: B row mismatch");
    if (!is_stabilizable(m.A, m.B))
        throw std::invalid_argument("model: (A, B) not stabilizable");
    if (mode == SynthesisMode::output_feedback) {
        if (m.C.size() == 0 || m.C.cols() != m.A.rows())
            throw std::invalid_argument("model: C missing or column mismatch");
        if (!is_detectable(m.A, m.C))
            throw std::invalid_argument("model: (A, C) not detectable");
    }
}

inline GainSet synthesize_gains(const Model& m, SynthesisMode mode) {
    validate_model(m, mode);
    GainSet g;
    g.Q = solve_care(m.A, m.B);
    g.P = g.Q.inverse();
    g.K = -(m.B.transpose() * g.Q);
    g.Gamma = g.Q * m.B * m.B.transpose() * g.Q;
    if (mode == SynthesisMode::output_feedback) {
        Eigen::MatrixXd Po = solve_care(m.A.transpose(), m.C.transpose());
        g.F = -(Po * m.C.transpose());
        if (!is_hurwitz(m.A + g.F * m.C))
            throw std::runtime_error("synthesis: A + FC not Hurwitz");
    }
    return g;
}

} // namespace etcon
