#include "asyncisac/fisher.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "asyncisac/errors.hpp"

namespace asyncisac {

namespace {

using cd = std::complex<double>;

void require_positive_noise(const ScenarioParams& params) {
  if (!(params.sigma2 > 0.0)) throw DomainError("Fisher information needs sigma2 > 0");
}

// Quantities shared by the reordered blocks and the closed forms.
struct SnapshotTerms {
  Eigen::VectorXcd a;
  Eigen::VectorXcd b;
  cd a_h;  // a^H h_s
  cd a_b;  // a^H b
  cd b_h;  // b^H h_s
};

SnapshotTerms snapshot_terms(const ArrayGeometry& geom, const ScenarioParams& params) {
  SnapshotTerms s;
  s.a = steering_vector(geom, params.theta_d);
  s.b = steering_derivative(geom, params.theta_d);
  s.a_h = s.a.dot(params.h_s);
  s.a_b = s.a.dot(s.b);
  s.b_h = s.b.dot(params.h_s);
  return s;
}

// Inverse of the psi_t block in terms of chi = a^H h_s + M d_t and Delta.
Eigen::Matrix3d closed_block_inverse(double M, double sigma2, double delta, cd chi) {
  const double re = chi.real();
  const double im = chi.imag();
  Eigen::Matrix3d rank_one;
  rank_one << im * im, -re * im, M * im,
              -re * im, re * re, -M * re,
              M * im, -M * re, M * M;
  Eigen::Matrix3d inv = (sigma2 / (M * delta)) * rank_one;
  inv(0, 0) += sigma2 / M;
  inv(1, 1) += sigma2 / M;
  return inv;
}

Eigen::Matrix3d generic_inverse(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d inv;
  bool invertible = false;
  m.computeInverseWithCheck(inv, invertible, 0.0);
  if (!invertible) throw SingularityError("3x3 snapshot block is singular", 0.0);
  return inv;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// ParameterLayout

ParameterLayout::ParameterLayout(FimModel model, int antennas, int snapshots)
    : model_(model), antennas_(antennas), snapshots_(snapshots) {
  if (antennas < 1 || snapshots < 1) throw DimensionError("parameter layout needs M >= 1 and T >= 1");
}

int ParameterLayout::size() const {
  return model_ == FimModel::joint ? 1 + 2 * antennas_ + 3 * snapshots_ : 1 + 3 * snapshots_;
}

int ParameterLayout::h_real(int m) const {
  if (model_ != FimModel::joint) throw DimensionError("h_s is not a parameter of the h_s-known model");
  return 1 + m;
}

int ParameterLayout::h_imag(int m) const {
  if (model_ != FimModel::joint) throw DimensionError("h_s is not a parameter of the h_s-known model");
  return 1 + antennas_ + m;
}

int ParameterLayout::d_real(int t) const {
  return model_ == FimModel::joint ? 1 + 2 * antennas_ + t : 1 + 3 * t;
}

int ParameterLayout::d_imag(int t) const {
  return model_ == FimModel::joint ? 1 + 2 * antennas_ + snapshots_ + t : 2 + 3 * t;
}

int ParameterLayout::phase(int t) const {
  return model_ == FimModel::joint ? 1 + 2 * antennas_ + 2 * snapshots_ + t : 3 + 3 * t;
}

// ---------------------------------------------------------------------------------------------
// Joint FIM

FimMatrix joint_fim(const ArrayGeometry& geom, const ScenarioParams& params) {
  params.validate(geom);
  require_positive_noise(params);
  const int M = geom.antennas;
  const int T = params.snapshots();
  const ParameterLayout L(FimModel::joint, M, T);
  const SnapshotTerms s = snapshot_terms(geom, params);
  const Eigen::VectorXcd& a = s.a;
  const Eigen::VectorXcd& b = s.b;
  const Eigen::VectorXcd& h = params.h_s;
  const Eigen::VectorXcd& d = params.d;
  const cd b_a = std::conj(s.a_b);
  const cd sum_d_conj = std::conj(d.sum());

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(L.size(), L.size());
  auto put = [&J](int i, int j, double v) {
    J(i, j) = v;
    J(j, i) = v;
  };

  put(L.theta(), L.theta(), b.squaredNorm() * d.squaredNorm());
  for (int m = 0; m < M; ++m) {
    const cd w = sum_d_conj * std::conj(b(m));
    put(L.theta(), L.h_real(m), w.real());
    put(L.theta(), L.h_imag(m), -w.imag());
  }
  for (int t = 0; t < T; ++t) {
    const cd dc = std::conj(d(t));
    put(L.theta(), L.d_real(t), (b_a * dc).real());
    put(L.theta(), L.d_imag(t), -(b_a * dc).imag());
    put(L.theta(), L.phase(t), -(s.b_h * dc + b_a * dc * d(t)).imag());
  }

  for (int m = 0; m < M; ++m) {
    put(L.h_real(m), L.h_real(m), T);
    put(L.h_imag(m), L.h_imag(m), T);
    for (int t = 0; t < T; ++t) {
      const cd col = h(m) + a(m) * d(t);
      put(L.h_real(m), L.d_real(t), a(m).real());
      put(L.h_real(m), L.d_imag(t), -a(m).imag());
      put(L.h_real(m), L.phase(t), -col.imag());
      put(L.h_imag(m), L.d_real(t), a(m).imag());
      put(L.h_imag(m), L.d_imag(t), a(m).real());
      put(L.h_imag(m), L.phase(t), col.real());
    }
  }

  for (int t = 0; t < T; ++t) {
    const cd chi = s.a_h + static_cast<double>(M) * d(t);
    put(L.d_real(t), L.d_real(t), M);
    put(L.d_imag(t), L.d_imag(t), M);
    put(L.d_real(t), L.phase(t), -chi.imag());
    put(L.d_imag(t), L.phase(t), chi.real());
    put(L.phase(t), L.phase(t), (h + a * d(t)).squaredNorm());
  }

  J /= params.sigma2;
  return {std::move(J), L};
}

// ---------------------------------------------------------------------------------------------
// Numeric oracle

FimMatrix fim_numeric_oracle(const ArrayGeometry& geom, const ScenarioParams& params, FimModel model) {
  params.validate(geom);
  require_positive_noise(params);
  const int M = geom.antennas;
  const int T = params.snapshots();
  const ParameterLayout L(model, M, T);

  // Real parameter vector <-> scenario, following the layout.
  Eigen::VectorXd base(L.size());
  base(L.theta()) = params.theta_d;
  if (model == FimModel::joint) {
    for (int m = 0; m < M; ++m) {
      base(L.h_real(m)) = params.h_s(m).real();
      base(L.h_imag(m)) = params.h_s(m).imag();
    }
  }
  for (int t = 0; t < T; ++t) {
    base(L.d_real(t)) = params.d(t).real();
    base(L.d_imag(t)) = params.d(t).imag();
    base(L.phase(t)) = params.phi_o(t);
  }
  auto mean_of = [&](const Eigen::VectorXd& p) {
    ScenarioParams q = params;
    q.theta_d = p(L.theta());
    if (model == FimModel::joint) {
      for (int m = 0; m < M; ++m) q.h_s(m) = cd(p(L.h_real(m)), p(L.h_imag(m)));
    }
    for (int t = 0; t < T; ++t) {
      q.d(t) = cd(p(L.d_real(t)), p(L.d_imag(t)));
      q.phi_o(t) = p(L.phase(t));
    }
    return Eigen::VectorXcd(noiseless_csi(geom, q).reshaped());
  };

  const Eigen::Index n_obs = static_cast<Eigen::Index>(M) * T;
  Eigen::MatrixXcd jac(n_obs, L.size());
  for (int i = 0; i < L.size(); ++i) {
    const double step = 1e-4 * std::max(1.0, std::abs(base(i)));
    auto shifted = [&](double k) {
      Eigen::VectorXd p = base;
      p(i) += k * step;
      return mean_of(p);
    };
    jac.col(i) = (8.0 * (shifted(1) - shifted(-1)) - (shifted(2) - shifted(-2))) / (12.0 * step);
  }

  // Under the library's noise convention each complex CSI sample has variance 2*sigma2, so the
  // Gaussian-mean FIM 2/var * Re{.} reduces to 1/sigma2 * Re{.}; no rescaling is applied.
  const double complex_noise_var = 2.0 * params.sigma2;
  Eigen::MatrixXd J = (2.0 / complex_noise_var) * (jac.adjoint() * jac).real();
  J = 0.5 * (J + J.transpose()).eval();
  return {std::move(J), L};
}

// ---------------------------------------------------------------------------------------------
// Constraint basis

Eigen::MatrixXd constraint_block(int snapshots) {
  if (snapshots < 2) throw DimensionError("constraint basis needs T >= 2");
  const double T = snapshots;
  const double rt = std::sqrt(T);
  Eigen::MatrixXd u(snapshots, snapshots - 1);
  u.topRows(snapshots - 1).setConstant(1.0 / (T + rt));
  u.topRows(snapshots - 1).diagonal().array() -= 1.0;
  u.row(snapshots - 1).setConstant(1.0 / rt);
  return u;
}

ConstraintBasis constraint_basis(int antennas, int snapshots) {
  const Eigen::MatrixXd sub = constraint_block(snapshots);
  const int free_dims = 2 * antennas + 1;
  const int rows = free_dims + 3 * snapshots;
  const int cols = free_dims + 3 * (snapshots - 1);
  ConstraintBasis basis{Eigen::MatrixXd::Zero(rows, cols), antennas, snapshots};
  basis.u.topLeftCorner(free_dims, free_dims).setIdentity();
  for (int k = 0; k < 3; ++k) {
    basis.u.block(free_dims + k * snapshots, free_dims + k * (snapshots - 1), snapshots, snapshots - 1) = sub;
  }
  return basis;
}

Eigen::MatrixXd constrained_crb(const FimMatrix& fim, const ConstraintBasis& basis) {
  if (fim.data.rows() != basis.u.rows()) throw DimensionError("FIM and constraint basis dimensions differ");
  const Eigen::MatrixXd reduced = basis.u.transpose() * fim.data * basis.u;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= hi * 1e-12) {
    throw SingularityError("U^T J U is singular or ill-conditioned", lo);
  }
  const Eigen::MatrixXd inv =
      eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  Eigen::MatrixXd crb = basis.u * inv * basis.u.transpose();
  return 0.5 * (crb + crb.transpose());
}

// ---------------------------------------------------------------------------------------------
// Reordered (h_s known) blocks

Eigen::MatrixXd ReorderedFim::dense() const {
  const int T = static_cast<int>(snapshots.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(1 + 3 * T, 1 + 3 * T);
  J(0, 0) = j_theta_theta;
  for (int t = 0; t < T; ++t) {
    J.block<3, 3>(1 + 3 * t, 1 + 3 * t) = snapshots[t].j_psi;
    J.block<1, 3>(0, 1 + 3 * t) = snapshots[t].j_theta_psi;
    J.block<3, 1>(1 + 3 * t, 0) = snapshots[t].j_theta_psi.transpose();
  }
  return J;
}

ReorderedFim reordered_blocks(const ArrayGeometry& geom, const ScenarioParams& params) {
  params.validate(geom);
  require_positive_noise(params);
  const double M = geom.antennas;
  const double inv_s2 = 1.0 / params.sigma2;
  const SnapshotTerms s = snapshot_terms(geom, params);
  const cd b_a = std::conj(s.a_b);

  ReorderedFim out;
  out.j_theta_theta = s.b.squaredNorm() * params.d.squaredNorm() * inv_s2;
  out.snapshots.resize(static_cast<std::size_t>(params.snapshots()));
  for (int t = 0; t < params.snapshots(); ++t) {
    const cd dt = params.d(t);
    const cd chi = s.a_h + M * dt;
    SnapshotBlock& blk = out.snapshots[static_cast<std::size_t>(t)];
    blk.j_psi << M, 0.0, -chi.imag(),
                 0.0, M, chi.real(),
                 -chi.imag(), chi.real(), (params.h_s + s.a * dt).squaredNorm();
    blk.j_psi *= inv_s2;
    const cd ab_d = s.a_b * dt;
    blk.j_theta_psi << ab_d.real(), ab_d.imag(), -(b_a * std::norm(dt) + s.b_h * std::conj(dt)).imag();
    blk.j_theta_psi *= inv_s2;
  }
  return out;
}

double static_separation(const Eigen::VectorXcd& a, const Eigen::VectorXcd& h_s) {
  const double aa = a.squaredNorm();
  const double hh = h_s.squaredNorm();
  const double delta = aa * hh - std::norm(a.dot(h_s));
  if (!(delta > 1e-12 * aa * hh)) {
    throw CollinearityError("static channel is collinear with the dynamic steering vector (Delta = " +
                            std::to_string(delta) + ")");
  }
  return delta;
}

Eigen::Matrix3d psi_block_inverse(const ArrayGeometry& geom, const ScenarioParams& params, int t) {
  params.validate(geom);
  require_positive_noise(params);
  if (t < 0 || t >= params.snapshots()) throw DimensionError("snapshot index out of range");
  const double M = geom.antennas;
  const Eigen::VectorXcd a = steering_vector(geom, params.theta_d);
  const double delta = static_separation(a, params.h_s);
  return closed_block_inverse(M, params.sigma2, delta, a.dot(params.h_s) + M * params.d(t));
}

double efim_theta_schur(const ArrayGeometry& geom, const ScenarioParams& params) {
  const ReorderedFim r = reordered_blocks(geom, params);
  static_separation(steering_vector(geom, params.theta_d), params.h_s);
  double j = r.j_theta_theta;
  for (const SnapshotBlock& blk : r.snapshots) {
    j -= blk.j_theta_psi * generic_inverse(blk.j_psi) * blk.j_theta_psi.transpose();
  }
  return j;
}

double efim_theta_closed(const ArrayGeometry& geom, const ScenarioParams& params) {
  params.validate(geom);
  require_positive_noise(params);
  const double M = geom.antennas;
  const SnapshotTerms s = snapshot_terms(geom, params);
  const double aa = s.a.squaredNorm();
  const double delta = static_separation(s.a, params.h_s);
  const double gamma = aa * s.b.squaredNorm() - std::norm(s.a_b);
  // c = b^H a a^H h_s - a^H a b^H h_s
  const cd c = std::conj(s.a_b) * s.a_h - aa * s.b_h;
  double penalty = 0.0;
  for (int t = 0; t < params.snapshots(); ++t) {
    const double v = (c * std::conj(params.d(t))).imag();
    penalty += v * v;
  }
  return params.d.squaredNorm() * gamma / (params.sigma2 * M) - penalty / (params.sigma2 * M * delta);
}

Eigen::Matrix3d efim_psi_t(const ArrayGeometry& geom, const ScenarioParams& params, int t) {
  if (params.snapshots() < 2) throw DimensionError("EFIM of psi_t needs at least 2 snapshots");
  if (t < 0 || t >= params.snapshots()) throw DimensionError("snapshot index out of range");
  const ReorderedFim r = reordered_blocks(geom, params);
  static_separation(steering_vector(geom, params.theta_d), params.h_s);
  double loo = r.j_theta_theta;
  for (int i = 0; i < params.snapshots(); ++i) {
    if (i == t) continue;
    const SnapshotBlock& blk = r.snapshots[static_cast<std::size_t>(i)];
    loo -= blk.j_theta_psi * generic_inverse(blk.j_psi) * blk.j_theta_psi.transpose();
  }
  if (!(loo > 0.0)) throw DegenerateBoundError("leave-one-out EFIM of theta is not positive");
  const SnapshotBlock& own = r.snapshots[static_cast<std::size_t>(t)];
  return own.j_psi - own.j_theta_psi.transpose() * own.j_theta_psi / loo;
}

std::vector<Eigen::Matrix3d> efim_psi_all(const ArrayGeometry& geom, const ScenarioParams& params) {
  const int T = params.snapshots();
  if (T < 2) throw DimensionError("EFIM of psi_t needs at least 2 snapshots");
  const ReorderedFim r = reordered_blocks(geom, params);
  const double M = geom.antennas;
  const Eigen::VectorXcd a = steering_vector(geom, params.theta_d);
  const double delta = static_separation(a, params.h_s);
  const cd a_h = a.dot(params.h_s);

  std::vector<double> removed(static_cast<std::size_t>(T));
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    const SnapshotBlock& blk = r.snapshots[static_cast<std::size_t>(t)];
    const Eigen::Matrix3d inv = closed_block_inverse(M, params.sigma2, delta, a_h + M * params.d(t));
    removed[static_cast<std::size_t>(t)] = blk.j_theta_psi * inv * blk.j_theta_psi.transpose();
    total += removed[static_cast<std::size_t>(t)];
  }
  std::vector<Eigen::Matrix3d> out(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const double loo = r.j_theta_theta - (total - removed[static_cast<std::size_t>(t)]);
    if (!(loo > 0.0)) throw DegenerateBoundError("leave-one-out EFIM of theta is not positive");
    const SnapshotBlock& own = r.snapshots[static_cast<std::size_t>(t)];
    out[static_cast<std::size_t>(t)] = own.j_psi - own.j_theta_psi.transpose() * own.j_theta_psi / loo;
  }
  return out;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) buf << ',';
      buf << m(r, c);
    }
    buf << '\n';
  }
  out << buf.str();
}

}  // namespace asyncisac
