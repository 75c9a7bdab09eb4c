#include "lasdp/core.hpp"

#include "lasdp/error.hpp"
#include "lasdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lasdp {

Dataset::Dataset(MatrixXd x, std::optional<std::vector<int>> true_labels)
    : x_(std::move(x)), true_labels_(std::move(true_labels)) {
  if (x_.rows() < 1 || x_.cols() < 1) {
    throw ValidationError("dataset needs p >= 1 and n >= 1");
  }
  if (!x_.allFinite()) {
    throw ValidationError("dataset contains non-finite entries");
  }
  if (true_labels_ && static_cast<Index>(true_labels_->size()) != x_.cols()) {
    throw DimensionMismatch("true labels length differs from sample count");
  }
}

Dataset Dataset::subset(const std::vector<Index>& columns) const {
  MatrixXd sub(p(), static_cast<Index>(columns.size()));
  std::optional<std::vector<int>> labels;
  if (true_labels_) {
    labels.emplace();
    labels->reserve(columns.size());
  }
  for (std::size_t j = 0; j < columns.size(); ++j) {
    sub.col(static_cast<Index>(j)) = x_.col(columns[j]);
    if (labels) {
      labels->push_back((*true_labels_)[static_cast<std::size_t>(columns[j])]);
    }
  }
  return Dataset(std::move(sub), std::move(labels));
}

Dataset Dataset::select_features(const std::vector<Index>& rows) const {
  MatrixXd sub(static_cast<Index>(rows.size()), n());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sub.row(static_cast<Index>(i)) = x_.row(rows[i]);
  }
  return Dataset(std::move(sub), true_labels_);
}

Partition::Partition(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) {
    throw ValidationError("partition needs k >= 1");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= k_) {
      throw ValidationError("label " + std::to_string(labels_[i]) + " at index " +
                            std::to_string(i) + " outside [0, " + std::to_string(k_) + ")");
    }
  }
}

Partition Partition::from_one_based(const std::vector<int>& labels, int k) {
  std::vector<int> zero(labels.size());
  std::transform(labels.begin(), labels.end(), zero.begin(), [](int l) { return l - 1; });
  return Partition(std::move(zero), k);
}

std::vector<Index> Partition::sizes() const {
  std::vector<Index> out(static_cast<std::size_t>(k_), 0);
  for (int l : labels_) {
    ++out[static_cast<std::size_t>(l)];
  }
  return out;
}

bool Partition::has_empty_cluster() const {
  const auto s = sizes();
  return std::any_of(s.begin(), s.end(), [](Index c) { return c == 0; });
}

std::vector<std::vector<Index>> Partition::members() const {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(k_));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out[static_cast<std::size_t>(labels_[i])].push_back(static_cast<Index>(i));
  }
  return out;
}

std::vector<int> Partition::one_based() const {
  std::vector<int> out(labels_.size());
  std::transform(labels_.begin(), labels_.end(), out.begin(), [](int l) { return l + 1; });
  return out;
}

Partition Partition::canonical() const {
  std::vector<int> remap(static_cast<std::size_t>(k_), -1);
  int next = 0;
  std::vector<int> out(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    int& r = remap[static_cast<std::size_t>(labels_[i])];
    if (r < 0) {
      r = next++;
    }
    out[i] = r;
  }
  return Partition(std::move(out), k_);
}

MatrixXd assignment_matrix(const Partition& partition) {
  MatrixXd h = MatrixXd::Zero(partition.n(), partition.k());
  for (Index i = 0; i < partition.n(); ++i) {
    h(i, partition[i]) = 1.0;
  }
  return h;
}

Partition partition_from_assignment(const MatrixXd& h) {
  std::vector<int> labels(static_cast<std::size_t>(h.rows()));
  for (Index i = 0; i < h.rows(); ++i) {
    int hit = -1;
    for (Index k = 0; k < h.cols(); ++k) {
      if (h(i, k) == 1.0) {
        if (hit >= 0) {
          throw ValidationError("assignment row " + std::to_string(i) + " has several ones");
        }
        hit = static_cast<int>(k);
      } else if (h(i, k) != 0.0) {
        throw ValidationError("assignment matrix is not binary");
      }
    }
    if (hit < 0) {
      throw ValidationError("assignment row " + std::to_string(i) + " has no one");
    }
    labels[static_cast<std::size_t>(i)] = hit;
  }
  return Partition(std::move(labels), static_cast<int>(h.cols()));
}

LiftedMembership::LiftedMembership(std::vector<MatrixXd> blocks, double feas_tol)
    : blocks_(std::move(blocks)), feas_tol_(feas_tol) {
  if (feas_tol_ < 0.0) {
    throw ValidationError("feas_tol must be nonnegative");
  }
  for (const auto& b : blocks_) {
    if (b.rows() != b.cols() || b.rows() != blocks_.front().rows()) {
      throw DimensionMismatch("lifted membership blocks must be square and equally sized");
    }
  }
}

MatrixXd LiftedMembership::sum() const {
  MatrixXd s = MatrixXd::Zero(n(), n());
  for (const auto& b : blocks_) {
    s += b;
  }
  return s;
}

LiftedMembership lift(const Partition& partition) {
  const auto sizes = partition.sizes();
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) {
      throw DegeneratePartition("cannot lift: cluster " + std::to_string(k + 1) + " is empty");
    }
  }
  const Index n = partition.n();
  std::vector<MatrixXd> blocks(sizes.size(), MatrixXd::Zero(n, n));
  const auto members = partition.members();
  for (std::size_t k = 0; k < members.size(); ++k) {
    const double w = 1.0 / static_cast<double>(sizes[k]);
    for (Index i : members[k]) {
      for (Index j : members[k]) {
        blocks[k](i, j) = w;
      }
    }
  }
  return LiftedMembership(std::move(blocks), 0.0);
}

std::pair<double, double> key_identity_check(const std::vector<MatrixXd>& a_list,
                                             const Partition& partition) {
  if (static_cast<int>(a_list.size()) != partition.k()) {
    throw DimensionMismatch("key_identity_check: need one similarity matrix per cluster");
  }
  for (const auto& a : a_list) {
    if (a.rows() != partition.n() || a.cols() != partition.n()) {
      throw DimensionMismatch("key_identity_check: similarity matrix must be n x n");
    }
  }
  const auto members = partition.members();
  double lhs = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (members[k].empty()) {
      continue;
    }
    double block = 0.0;
    for (Index i : members[k]) {
      for (Index j : members[k]) {
        block += a_list[k](i, j);
      }
    }
    lhs += block / static_cast<double>(members[k].size());
  }
  const LiftedMembership z = lift(partition);
  double rhs = 0.0;
  for (int k = 0; k < z.k(); ++k) {
    rhs += frobenius_dot(a_list[static_cast<std::size_t>(k)], z.block(k));
  }
  return {lhs, rhs};
}

double FeasibilityResiduals::worst() const {
  return std::max({-min_entry, -min_eig, trace_gap, rowsum_gap});
}

FeasibilityResiduals feasibility_residuals(const LiftedMembership& z) {
  FeasibilityResiduals r;
  if (z.k() == 0) {
    return r;
  }
  double trace = 0.0;
  for (const auto& b : z.blocks()) {
    r.min_entry = std::min(r.min_entry, b.minCoeff());
    const MatrixXd sym = linalg::symmetrize(b);
    r.min_eig = std::min(r.min_eig, linalg::sym_eigenvalues(sym).minCoeff());
    trace += b.trace();
  }
  r.trace_gap = std::abs(trace - static_cast<double>(z.k()));
  r.rowsum_gap = (z.sum().rowwise().sum().array() - 1.0).abs().maxCoeff();
  return r;
}

FeasibilityResiduals feasibility_residuals(const MatrixXd& z, int k) {
  FeasibilityResiduals r;
  r.min_entry = std::min(0.0, z.minCoeff());
  r.min_eig = std::min(0.0, linalg::sym_eigenvalues(linalg::symmetrize(z)).minCoeff());
  r.trace_gap = std::abs(z.trace() - static_cast<double>(k));
  r.rowsum_gap = (z.rowwise().sum().array() - 1.0).abs().maxCoeff();
  return r;
}

}  // namespace lasdp
