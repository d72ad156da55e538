#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

namespace etcon {

// Communication topology. Edge (j, i) means information flows j -> i,
// so a_ij = 1 and j is an in-neighbor of i.
class Graph {
public:
    Graph(int agents, const std::vector<std::pair<int, int>>& edges, bool undirected)
        : n_(agents), undirected_(undirected), adj_(Eigen::MatrixXd::Zero(agents, agents)) {
        for (auto [from, to] : edges) {
            if (from < 0 || from >= agents || to < 0 || to >= agents)
                throw std::invalid_argument("graph: edge endpoint out of range");
            if (from == to) continue;
            adj_(to, from) = 1.0;
            if (undirected) adj_(from, to) = 1.0;
        }
        lap_ = Eigen::MatrixXd(adj_.rowwise().sum().asDiagonal());
        lap_ -= adj_;
    }

    int agents() const { return n_; }
    bool undirected() const { return undirected_; }
    const Eigen::MatrixXd& adjacency() const { return adj_; }
    const Eigen::MatrixXd& laplacian() const { return lap_; }

    std::vector<int> in_neighbors(int i) const {
        std::vector<int> out;
        for (int j = 0; j < n_; ++j)
            if (adj_(i, j) > 0) out.push_back(j);
        return out;
    }

    std::vector<int> out_neighbors(int i) const {
        std::vector<int> out;
        for (int j = 0; j < n_; ++j)
            if (adj_(j, i) > 0) out.push_back(j);
        return out;
    }

    bool connected() const {
        // on the symmetrized adjacency
        return reachable_count(true, 0) == n_;
    }

    bool strongly_connected() const {
        return reachable_count(false, 0) == n_ && reachable_count_reverse(0) == n_;
    }

    bool spanning_tree_from(int root) const {
        return reachable_count(false, root) == n_;
    }

private:
    int reach(const Eigen::MatrixXd& a, int start) const {
        std::vector<char> seen(n_, 0);
        std::vector<int> stack{start};
        seen[start] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w = 0; w < n_; ++w) {
                if (!seen[w] && a(w, v) > 0) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count;
    }
    int reachable_count(bool symmetric, int start) const {
        if (!symmetric) return reach(adj_, start);
        Eigen::MatrixXd s = adj_ + adj_.transpose();
        return reach(s, start);
    }
    int reachable_count_reverse(int start) const {
        Eigen::MatrixXd t = adj_.transpose();
        return reach(t, start);
    }

    int n_;
    bool undirected_;
    Eigen::MatrixXd adj_;
    Eigen::MatrixXd lap_;
};

// Spectral quantities used by the directed-graph analysis: the positive left
// null eigenvector r of the Laplacian (normalized to sum 1), R = diag(r),
// the symmetrized Laplacian L_hat = R L + L^T R, and its eigenvalue extremes.
struct SpectralData {
    Eigen::VectorXd r;
    Eigen::MatrixXd laplacian_hat;
    double lambda2 = 0.0;
    double lambdaN = 0.0;
};

inline SpectralData analyze_spectrum(const Graph& g) {
    const Eigen::MatrixXd& L = g.laplacian();
    const int N = g.agents();
    SpectralData s;
    if (N == 1) {
        s.r = Eigen::VectorXd::Ones(1);
        s.laplacian_hat = L;
        return s;
    }
    if (g.undirected()) {
        s.r = Eigen::VectorXd::Constant(N, 1.0 / N);
        s.laplacian_hat = L;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
        s.lambda2 = es.eigenvalues()(1);
        s.lambdaN = es.eigenvalues()(N - 1);
        return s;
    }
    if (!g.strongly_connected())
        throw std::invalid_argument("spectrum: directed graph must be strongly connected");
    Eigen::EigenSolver<Eigen::MatrixXd> es(L.transpose());
    int best = 0;
    for (int k = 1; k < N; ++k)
        if (std::abs(es.eigenvalues()(k)) < std::abs(es.eigenvalues()(best))) best = k;
    Eigen::VectorXd r = es.eigenvectors().col(best).real();
    if (r.sum() < 0) r = -r;
    if (r.minCoeff() <= 0)
        throw std::runtime_error("spectrum: left eigenvector not positive");
    r /= r.sum();
    if ((r.transpose() * L).norm() > 1e-10 * L.norm())
        throw std::runtime_error("spectrum: left eigenvector residual too large");
    s.r = r;
    s.laplacian_hat = r.asDiagonal() * L + L.transpose() * r.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hs(s.laplacian_hat);
    s.lambda2 = hs.eigenvalues()(1);
    s.lambdaN = hs.eigenvalues()(N - 1);
    return s;
}

} // namespace etcon
