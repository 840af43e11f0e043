// Representation pipeline: ridge base encoder, structure-aware smoothing
// operator, Lipschitz bounds, the unified objective and a representation-level
// gradient trainer.
#ifndef RELREP_ENCODER_HPP
#define RELREP_ENCODER_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relrep/graph.hpp"
#include "relrep/uncertainty.hpp"

namespace relrep {

struct EncoderModel {
    Eigen::MatrixXd W;               ///< m x d ridge weights
    Eigen::VectorXd b;               ///< d intercept; mu_base = X W + b
    std::optional<Eigen::MatrixXd> M_S; ///< d x d structure smoothing operator
    Eigen::MatrixXd Sigma_global;    ///< d x d SPD global representation covariance
    double lambda_ridge = 0.0;

    EncoderModel with_smoothing(Eigen::MatrixXd m) const {
        EncoderModel out = *this;
        out.M_S = std::move(m);
        return out;
    }
};

/// Ridge regression of targets on X, both centered at their training means.
/// W solves (X_c^T X_c + lambda I) W = X_c^T T_c; Sigma_global is the
/// training residual covariance shrunk to SPD.
EncoderModel fit_ridge_encoder(const Eigen::MatrixXd& X, const Eigen::MatrixXd& targets,
                               double lambda_ridge);

/// Dimension-level graph induced by the group graph: dims in the same group
/// form a unit-weight clique, dims in adjacent groups are connected with the
/// group edge weight. Used by the smoothing operator and the structural
/// energy diagnostics.
StructureGraph lifted_dimension_graph(const StructureGraph& group_graph,
                                      const std::vector<int>& group_of);

/// Tikhonov graph filter M_S = (I + gamma L)^{-1} over the lifted dimension
/// graph. Symmetric, rows sum to 1, eigenvalues in (0, 1].
Eigen::MatrixXd smoothing_operator(const StructureGraph& group_graph,
                                   const std::vector<int>& group_of, double gamma);

/// mu_base = X W + b; with use_structure, right-multiplied by M_S^T.
Eigen::MatrixXd encode(const EncoderModel& model, const Eigen::MatrixXd& X, bool use_structure);

/// Spectral norm of W, times the spectral norm of M_S when with_structure.
double lipschitz_bound(const EncoderModel& model, bool with_structure);

/// Frozen linear softmax head used by the task term of the unified objective.
struct LinearHead {
    Eigen::MatrixXd V; ///< d x K
    Eigen::VectorXd c; ///< K
};

struct ObjectiveWeights {
    double lambda_task = 1.0;
    double lambda_uncertainty = 0.0;
    double lambda_structure = 0.0;
};

/// L = lambda_task * CE(head on Z) + lambda_u * R_uncertainty
///   + lambda_s * R_structural-uncertainty. The head is frozen; Z is free.
double unified_objective(const Eigen::MatrixXd& Z, const std::vector<Eigen::MatrixXd>& sigmas,
                         const std::vector<int>& labels, const StructureGraph& g,
                         const LinearHead* head, const ObjectiveWeights& wts, PhiMode mode);

/// Analytic gradient of unified_objective with respect to Z.
Eigen::MatrixXd unified_objective_grad(const Eigen::MatrixXd& Z,
                                       const std::vector<Eigen::MatrixXd>& sigmas,
                                       const std::vector<int>& labels, const StructureGraph& g,
                                       const LinearHead* head, const ObjectiveWeights& wts,
                                       PhiMode mode);

/// Gradient descent on the unified objective with Z as free parameters.
/// Backtracking halves the step on any increase; accepted steps never raise
/// the objective. Stops on relative change < 1e-10 or step budget.
/// Throws if the objective becomes non-finite.
Eigen::MatrixXd train_representations(const Eigen::MatrixXd& Z_init,
                                      const std::vector<Eigen::MatrixXd>& sigmas,
                                      const std::vector<int>& labels, const StructureGraph& g,
                                      const LinearHead* head, const ObjectiveWeights& wts,
                                      int steps, double lr, PhiMode mode,
                                      std::vector<double>* objective_trace = nullptr);

std::vector<Eigen::MatrixXd> replicate_sigma(const Eigen::MatrixXd& sigma, int n);

// Model serialization: JSON sidecar for scalars plus one CSV per matrix.
// Round trips exactly.
void save_encoder(const EncoderModel& model, const std::string& dir);
EncoderModel load_encoder(const std::string& dir);

} // namespace relrep

#endif
