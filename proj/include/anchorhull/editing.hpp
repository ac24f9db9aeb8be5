#pragma once

#include "anchorhull/anchor_set.hpp"

namespace anchorhull {

/// A latent editing direction re-expressed over the anchor span:
/// `projected` is the orthogonal projection of `raw` onto span(M) and
/// `gamma` its coordinates, so projected == M * gamma.
struct EditDirection {
    VectorXd raw;
    VectorXd projected;
    VectorXd gamma;
};

/// Projects n onto the anchor span via the normal equations. Requires
/// independent anchors.
EditDirection project_direction(const AnchorSet& anchors, const VectorXd& n);

/// Variant with mean(gamma) subtracted from every coordinate, so traversal
/// stays on the sum-1 slice. `raw` is kept; `projected` is recomputed from
/// the deflated coordinates.
EditDirection deflate(const AnchorSet& anchors, const EditDirection& dir);

/// alpha_w + theta * gamma. Commutes with the linear map:
/// to_latent(edit(...)) == to_latent(alpha_w) + theta * projected.
AlphaCode edit(const AnchorSet& anchors, const AlphaCode& alpha_w, const EditDirection& dir,
               double theta);

struct EditBudget {
    double beta = 0.0;
    double theta_max = 0.0;
    bool unbounded = false;  // gamma has no negative coordinate
};

/// Largest theta >= 0 keeping every coefficient of alpha_w + theta*gamma
/// at or above -beta: min over {i: gamma_i < 0} of (alpha_i + beta) / -gamma_i.
EditBudget edit_budget(const AlphaCode& alpha_w, const EditDirection& dir, double beta);

/// argmin_alpha ||M alpha - w||^2 subject to sum(alpha) = 1 and
/// alpha_i >= -beta. Projected gradient whose feasibility projection
/// alternates between the sum hyperplane and the lower-bound box
/// (Dykstra corrections); falls back to the exact active-set solve for
/// N <= 12 if the iteration stalls.
AlphaCode project_to_hull(const AnchorSet& anchors, const LatentCode& w_target, double beta);

/// Exhaustive active-set solve: tries every subset of coefficients pinned
/// at -beta and returns the KKT-consistent optimum. Exact, 2^N subsets.
AlphaCode project_to_hull_active_set(const AnchorSet& anchors, const LatentCode& w_target,
                                     double beta);

enum class EditPolicy { Stop, ProjectBack };

/// Traversal bounded by the dilation budget. Within the budget both
/// policies return the plain edit; past it, Stop clamps theta at the
/// boundary and ProjectBack projects the escaped latent back onto the
/// dilated hull.
AlphaCode edit_with_policy(const AnchorSet& anchors, const AlphaCode& alpha_w,
                           const EditDirection& dir, double theta, double beta,
                           EditPolicy policy);

}  // namespace anchorhull
