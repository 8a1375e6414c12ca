#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "asyncisac/array_model.hpp"

namespace asyncisac {

/// Which real parameter vector a FIM is taken over.
enum class FimModel {
  /// [theta | Re h_s (M) | Im h_s (M) | Re d (T) | Im d (T) | phi_o (T)]
  joint,
  /// h_s known: [theta | (Re d_1, Im d_1, phi_1) | ... | (Re d_T, Im d_T, phi_T)]
  static_known,
};

/// Index arithmetic for both parameter orderings. Every FIM row/column lookup goes through here.
class ParameterLayout {
 public:
  ParameterLayout(FimModel model, int antennas, int snapshots);

  FimModel model() const { return model_; }
  int antennas() const { return antennas_; }
  int snapshots() const { return snapshots_; }
  int size() const;

  int theta() const { return 0; }
  int h_real(int m) const;  ///< joint only
  int h_imag(int m) const;  ///< joint only
  int d_real(int t) const;
  int d_imag(int t) const;
  int phase(int t) const;

 private:
  FimModel model_;
  int antennas_;
  int snapshots_;
};

/// Real symmetric Fisher information matrix with the ordering described by `layout`.
struct FimMatrix {
  Eigen::MatrixXd data;
  ParameterLayout layout;
};

/// Per-snapshot blocks of the h_s-known FIM over psi_t = (Re d_t, Im d_t, phi_t).
struct SnapshotBlock {
  Eigen::Matrix3d j_psi;          ///< J_{psi_t, psi_t}
  Eigen::RowVector3d j_theta_psi;  ///< J_{theta, psi_t}
};

struct ReorderedFim {
  double j_theta_theta = 0.0;
  std::vector<SnapshotBlock> snapshots;

  /// Dense (1 + 3T) matrix in FimModel::static_known ordering.
  Eigen::MatrixXd dense() const;
};

/// Orthonormal basis of the tangent space of the zero-sum constraints on Re d, Im d and phi_o.
struct ConstraintBasis {
  Eigen::MatrixXd u;
  int antennas = 0;
  int snapshots = 0;
};

/// Joint FIM over FimModel::joint, assembled from the closed-form submatrices and scaled by
/// 1/sigma2. Throws DomainError for sigma2 <= 0.
FimMatrix joint_fim(const ArrayGeometry& geom, const ScenarioParams& params);

/// Independent oracle: J_ij = (2 / noise_var) Re{(dmu/dpsi_i)^H (dmu/dpsi_j)} with mu the noiseless
/// CSI and Jacobian columns from 5-point central differences. Knows nothing about the closed forms.
FimMatrix fim_numeric_oracle(const ArrayGeometry& geom, const ScenarioParams& params,
                             FimModel model = FimModel::joint);

/// T x (T-1) block: top (T-1) rows = 1/(T+sqrt T) - I, last row = 1/sqrt(T).
Eigen::MatrixXd constraint_block(int snapshots);

/// Block-diagonal U = diag(I_{2M+1}, U_sub, U_sub, U_sub). Throws DimensionError for T < 2.
ConstraintBasis constraint_basis(int antennas, int snapshots);

/// U (U^T J U)^{-1} U^T. Throws SingularityError when cond(U^T J U) > 1e12.
Eigen::MatrixXd constrained_crb(const FimMatrix& fim, const ConstraintBasis& basis);

/// J_{theta,theta} plus the per-snapshot blocks of the h_s-known FIM.
ReorderedFim reordered_blocks(const ArrayGeometry& geom, const ScenarioParams& params);

/// Delta = |a|^2 |h_s|^2 - |a^H h_s|^2. Throws CollinearityError when Delta <= 1e-12 |a|^2 |h_s|^2.
double static_separation(const Eigen::VectorXcd& a, const Eigen::VectorXcd& h_s);

/// Closed-form inverse of J_{psi_t, psi_t}.
Eigen::Matrix3d psi_block_inverse(const ArrayGeometry& geom, const ScenarioParams& params, int t);

/// Equivalent FIM of theta: J_tt - sum_t J_{t,psi_t} J_{psi_t}^{-1} J_{t,psi_t}^T using generic
/// 3x3 inverses.
double efim_theta_schur(const ArrayGeometry& geom, const ScenarioParams& params);

/// Closed-form equivalent FIM of theta.
double efim_theta_closed(const ArrayGeometry& geom, const ScenarioParams& params);

/// EFIM of psi_t after eliminating theta, with the leave-one-out EFIM of theta.
/// Throws DimensionError when T == 1, DegenerateBoundError when the leave-one-out EFIM is <= 0.
Eigen::Matrix3d efim_psi_t(const ArrayGeometry& geom, const ScenarioParams& params, int t);

/// efim_psi_t for every snapshot in O(T) using the closed-form block inverses.
std::vector<Eigen::Matrix3d> efim_psi_all(const ArrayGeometry& geom, const ScenarioParams& params);

/// Row-major CSV, 17 significant digits, LF line endings.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace asyncisac
