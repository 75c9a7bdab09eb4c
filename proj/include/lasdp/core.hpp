#pragma once

// Domain types shared by every module: the data matrix, hard partitions,
// assignment matrices and the K-block lifted membership matrices.
//
// Labels are 0-based everywhere inside the library. The CSV readers and
// writers in io.hpp convert from/to the 1-based labels used in files.

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace lasdp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// p x n observations, one sample per column, with optional ground truth.
class Dataset {
 public:
  explicit Dataset(MatrixXd x, std::optional<std::vector<int>> true_labels = std::nullopt);

  const MatrixXd& x() const { return x_; }
  Index p() const { return x_.rows(); }
  Index n() const { return x_.cols(); }
  const std::optional<std::vector<int>>& true_labels() const { return true_labels_; }

  /// Copy restricted to the given sample indices (labels follow).
  Dataset subset(const std::vector<Index>& columns) const;
  /// Copy restricted to the given feature rows.
  Dataset select_features(const std::vector<Index>& rows) const;

 private:
  MatrixXd x_;
  std::optional<std::vector<int>> true_labels_;
};

/// Hard assignment of n indices into k clusters, labels in [0, k).
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<int> labels, int k);

  static Partition from_one_based(const std::vector<int>& labels, int k);

  int k() const { return k_; }
  Index n() const { return static_cast<Index>(labels_.size()); }
  const std::vector<int>& labels() const { return labels_; }
  int operator[](Index i) const { return labels_[static_cast<std::size_t>(i)]; }

  std::vector<Index> sizes() const;
  bool has_empty_cluster() const;
  std::vector<std::vector<Index>> members() const;
  std::vector<int> one_based() const;

  /// Relabel clusters in order of first appearance; k is preserved.
  Partition canonical() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

/// n x k binary matrix H with one 1 per row.
MatrixXd assignment_matrix(const Partition& partition);
Partition partition_from_assignment(const MatrixXd& h);

/// K symmetric n x n blocks (Z_1, ..., Z_K), the LA-SDP decision variable.
class LiftedMembership {
 public:
  LiftedMembership() = default;
  explicit LiftedMembership(std::vector<MatrixXd> blocks, double feas_tol = 1e-6);

  const std::vector<MatrixXd>& blocks() const { return blocks_; }
  const MatrixXd& block(int k) const { return blocks_[static_cast<std::size_t>(k)]; }
  int k() const { return static_cast<int>(blocks_.size()); }
  Index n() const { return blocks_.empty() ? 0 : blocks_.front().rows(); }
  double feas_tol() const { return feas_tol_; }

  /// Z = sum_k Z_k, the classic single membership matrix.
  MatrixXd sum() const;

 private:
  std::vector<MatrixXd> blocks_;
  double feas_tol_ = 1e-6;
};

/// Z_k = H_k |G_k|^{-1} H_k^T for every cluster.
LiftedMembership lift(const Partition& partition);

/// Both sides of sum_k w_k sum_{i,j in G_k} a_ij^(k) = sum_k <A^(k), H_k w_k H_k^T>.
/// Left side by direct summation, right side through the lifted matrices.
std::pair<double, double> key_identity_check(const std::vector<MatrixXd>& a_list,
                                             const Partition& partition);

/// Worst violation of each constraint family of the lifted relaxation.
/// min_entry and min_eig are <= 0 (0 means no violation).
struct FeasibilityResiduals {
  double min_entry = 0.0;
  double min_eig = 0.0;
  double trace_gap = 0.0;
  double rowsum_gap = 0.0;

  double worst() const;
  bool within(double tol) const { return worst() <= tol; }
};

FeasibilityResiduals feasibility_residuals(const LiftedMembership& z);
/// Same constraint families for a single membership matrix with trace target k.
FeasibilityResiduals feasibility_residuals(const MatrixXd& z, int k);

/// <A, B> Frobenius inner product.
inline double frobenius_dot(const MatrixXd& a, const MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace lasdp
