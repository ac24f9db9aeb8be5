#include "anchorhull/editing.hpp"

#include <cmath>
#include <sstream>

namespace anchorhull {

EditDirection project_direction(const AnchorSet& anchors, const VectorXd& n) {
    require(n.size() == anchors.latent_dim(),
            "project_direction: direction length " + std::to_string(n.size()) +
                " != latent dimension " + std::to_string(anchors.latent_dim()));
    require(all_finite(n), "project_direction: direction has non-finite entries");
    EditDirection dir;
    dir.raw = n;
    dir.gamma = anchors.gram_inverse() * (anchors.matrix().transpose() * n);
    dir.projected = anchors.matrix() * dir.gamma;
    return dir;
}

EditDirection deflate(const AnchorSet& anchors, const EditDirection& dir) {
    EditDirection out;
    out.raw = dir.raw;
    out.gamma = dir.gamma.array() - dir.gamma.mean();
    out.projected = anchors.matrix() * out.gamma;
    return out;
}

AlphaCode edit(const AnchorSet& anchors, const AlphaCode& alpha_w, const EditDirection& dir,
               double theta) {
    require(alpha_w.coeffs.size() == anchors.count(), "edit: code length != anchor count");
    require(dir.gamma.size() == anchors.count(), "edit: direction length != anchor count");
    return AlphaCode(alpha_w.coeffs + theta * dir.gamma, alpha_w.beta);
}

EditBudget edit_budget(const AlphaCode& alpha_w, const EditDirection& dir, double beta) {
    require(beta >= 0.0, "edit_budget: beta must be >= 0");
    require(alpha_w.coeffs.size() == dir.gamma.size(), "edit_budget: size mismatch");
    require(dilation_of(alpha_w) <= beta + 1e-9,
            "edit_budget: starting code already exceeds the dilation budget");
    EditBudget budget;
    budget.beta = beta;
    budget.unbounded = true;
    budget.theta_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < dir.gamma.size(); ++i) {
        if (dir.gamma[i] < 0.0) {
            budget.unbounded = false;
            budget.theta_max =
                std::min(budget.theta_max, (alpha_w.coeffs[i] + beta) / -dir.gamma[i]);
        }
    }
    if (!budget.unbounded && budget.theta_max < 0.0) budget.theta_max = 0.0;
    return budget;
}

namespace {

// Euclidean projection onto {sum = 1} intersected with {alpha >= -beta},
// via Dykstra's alternating projections between the hyperplane and the box.
VectorXd project_feasible(VectorXd x, double beta) {
    const Eigen::Index n = x.size();
    VectorXd p = VectorXd::Zero(n);
    VectorXd q = VectorXd::Zero(n);
    for (int iter = 0; iter < 4000; ++iter) {
        const VectorXd xp = x + p;
        const VectorXd y = xp.array() - (xp.sum() - 1.0) / static_cast<double>(n);
        p = xp - y;
        const VectorXd yq = y + q;
        VectorXd x_next = yq.cwiseMax(-beta);
        q = yq - x_next;
        const double change = (x_next - x).lpNorm<Eigen::Infinity>();
        x = std::move(x_next);
        if (change < 1e-16 && std::abs(x.sum() - 1.0) < 1e-13) break;
    }
    return x;
}

struct KktCheck {
    bool ok = false;
    double stationarity = 0.0;
    double dual_violation = 0.0;
};

KktCheck kkt_residual(const MatrixXd& gram, const VectorXd& lin, const VectorXd& alpha,
                      double beta) {
    // gradient of ||M a - w||^2 is 2(G a - M^T w)
    const VectorXd grad = 2.0 * (gram * alpha - lin);
    const double scale = 1.0 + grad.lpNorm<Eigen::Infinity>();
    const double active_tol = 1e-9 * (1.0 + std::abs(beta));

    double free_sum = 0.0;
    int free_count = 0;
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (alpha[i] > -beta + active_tol) {
            free_sum += grad[i];
            ++free_count;
        }
    }
    if (free_count == 0) return {};
    const double nu = -free_sum / free_count;

    KktCheck out;
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        const double mu = grad[i] + nu;
        if (alpha[i] > -beta + active_tol)
            out.stationarity = std::max(out.stationarity, std::abs(mu));
        else
            out.dual_violation = std::max(out.dual_violation, -mu);
    }
    out.ok = out.stationarity <= 1e-10 * scale && out.dual_violation <= 1e-10 * scale &&
             std::abs(alpha.sum() - 1.0) <= 1e-10 && alpha.minCoeff() >= -beta - 1e-10;
    return out;
}

std::string dump_iterate(const VectorXd& alpha) {
    std::ostringstream os;
    os << "[";
    for (Eigen::Index i = 0; i < alpha.size(); ++i) os << (i ? ", " : "") << alpha[i];
    os << "]";
    return os.str();
}

}  // namespace

AlphaCode project_to_hull_active_set(const AnchorSet& anchors, const LatentCode& w_target,
                                     double beta) {
    require(beta >= 0.0, "project_to_hull: beta must be >= 0");
    require(w_target.vector.size() == anchors.latent_dim(),
            "project_to_hull: target length != latent dimension");
    const int n = anchors.count();
    require(n <= 20, "project_to_hull_active_set: enumeration limited to N <= 20");

    const MatrixXd& M = anchors.matrix();
    const MatrixXd gram = M.transpose() * M;
    const VectorXd lin = M.transpose() * w_target.vector;

    bool found = false;
    double best_obj = 0.0;
    VectorXd best;

    for (uint32_t pinned = 0; pinned < (1u << n); ++pinned) {
        std::vector<int> free_idx;
        for (int i = 0; i < n; ++i)
            if (!(pinned & (1u << i))) free_idx.push_back(i);
        if (free_idx.empty()) continue;
        const int nf = static_cast<int>(free_idx.size());
        const int ns = n - nf;

        // equality-constrained least squares on the free block
        VectorXd target = w_target.vector;
        for (int i = 0; i < n; ++i)
            if (pinned & (1u << i)) target += beta * M.col(i);

        MatrixXd kkt = MatrixXd::Zero(nf + 1, nf + 1);
        VectorXd rhs(nf + 1);
        for (int r = 0; r < nf; ++r) {
            for (int c = 0; c < nf; ++c) kkt(r, c) = 2.0 * gram(free_idx[static_cast<size_t>(r)], free_idx[static_cast<size_t>(c)]);
            kkt(r, nf) = 1.0;
            kkt(nf, r) = 1.0;
            rhs[r] = 2.0 * M.col(free_idx[static_cast<size_t>(r)]).dot(target);
        }
        rhs[nf] = 1.0 + beta * ns;

        Eigen::FullPivLU<MatrixXd> lu(kkt);
        if (!lu.isInvertible()) continue;
        const VectorXd sol = lu.solve(rhs);

        VectorXd alpha = VectorXd::Constant(n, -beta);
        for (int r = 0; r < nf; ++r) alpha[free_idx[static_cast<size_t>(r)]] = sol[r];
        const double nu = sol[nf];

        // primal feasibility of the free block
        bool feasible = true;
        for (int r = 0; r < nf && feasible; ++r)
            if (alpha[free_idx[static_cast<size_t>(r)]] < -beta - 1e-9) feasible = false;
        if (!feasible) continue;

        // dual feasibility of the pinned block
        const VectorXd grad = 2.0 * (gram * alpha - lin);
        for (int i = 0; i < n && feasible; ++i)
            if (pinned & (1u << i))
                if (grad[i] + nu < -1e-9 * (1.0 + grad.lpNorm<Eigen::Infinity>())) feasible = false;
        if (!feasible) continue;

        const double obj = (M * alpha - w_target.vector).squaredNorm();
        if (!found || obj < best_obj) {
            found = true;
            best_obj = obj;
            best = alpha;
        }
    }
    if (!found)
        throw std::runtime_error("project_to_hull_active_set: no KKT-consistent subset found");
    return AlphaCode(std::move(best), beta);
}

AlphaCode project_to_hull(const AnchorSet& anchors, const LatentCode& w_target, double beta) {
    require(beta >= 0.0, "project_to_hull: beta must be >= 0");
    require(w_target.vector.size() == anchors.latent_dim(),
            "project_to_hull: target length " + std::to_string(w_target.vector.size()) +
                " != latent dimension " + std::to_string(anchors.latent_dim()));
    const int n = anchors.count();
    const MatrixXd& M = anchors.matrix();
    const MatrixXd gram = M.transpose() * M;
    const VectorXd lin = M.transpose() * w_target.vector;

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
    const double lip = 2.0 * eig.eigenvalues().maxCoeff();
    if (!(lip > 0.0)) return AlphaCode(VectorXd::Constant(n, 1.0 / n), beta);  // M == 0
    const double step = 1.0 / lip;

    VectorXd alpha = project_feasible(VectorXd::Constant(n, 1.0 / n), beta);
    constexpr int kMaxIters = 200000;
    for (int iter = 1; iter <= kMaxIters; ++iter) {
        const VectorXd grad = 2.0 * (gram * alpha - lin);
        VectorXd next = project_feasible(alpha - step * grad, beta);
        const double change = (next - alpha).lpNorm<Eigen::Infinity>();
        alpha = std::move(next);
        if (change < 1e-15 || (iter % 128 == 0 && kkt_residual(gram, lin, alpha, beta).ok)) {
            if (kkt_residual(gram, lin, alpha, beta).ok) return AlphaCode(std::move(alpha), beta);
        }
    }
    if (n <= 12) return project_to_hull_active_set(anchors, w_target, beta);
    throw std::runtime_error("project_to_hull: projected gradient did not converge; iterate " +
                             dump_iterate(alpha));
}

AlphaCode edit_with_policy(const AnchorSet& anchors, const AlphaCode& alpha_w,
                           const EditDirection& dir, double theta, double beta,
                           EditPolicy policy) {
    require(theta >= 0.0, "edit_with_policy: theta must first be >= 0; negate gamma to go back");
    const EditBudget budget = edit_budget(alpha_w, dir, beta);
    if (budget.unbounded || theta <= budget.theta_max) return edit(anchors, alpha_w, dir, theta);

    if (policy == EditPolicy::Stop) return edit(anchors, alpha_w, dir, budget.theta_max);

    const AlphaCode escaped = edit(anchors, alpha_w, dir, theta);
    const LatentCode w_escaped = to_latent(anchors, escaped);
    return project_to_hull(anchors, w_escaped, beta);
}

}  // namespace anchorhull
