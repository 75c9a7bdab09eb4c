#include "lasdp/likelihood.hpp"

#include "lasdp/error.hpp"
#include "lasdp/kernels.hpp"
#include "lasdp/linalg.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace lasdp {

SimilarityMatrix similarity_matrix(const Dataset& data, const MatrixXd& sigma, int k) {
  if (sigma.rows() != data.p() || sigma.cols() != data.p()) {
    throw DimensionMismatch("similarity_matrix: covariance must be p x p");
  }
  const linalg::SpdFactor f(sigma);
  return {kernels::similarity(data.x(), f.inverse(), f.logdet()), k};
}

std::vector<MatrixXd> similarity_matrices(const Dataset& data,
                                          const std::vector<MatrixXd>& covariances) {
  std::vector<MatrixXd> out;
  out.reserve(covariances.size());
  for (std::size_t k = 0; k < covariances.size(); ++k) {
    out.push_back(similarity_matrix(data, covariances[k], static_cast<int>(k)).a);
  }
  return out;
}

FactoredCost similarity_factors(const Dataset& data, const MatrixXd& sigma) {
  if (sigma.rows() != data.p() || sigma.cols() != data.p()) {
    throw DimensionMismatch("similarity_factors: covariance must be p x p");
  }
  const linalg::SpdFactor f(sigma);
  const Index p = data.p();
  const Index n = data.n();
  FactoredCost out;
  out.f.resize(n, p + 2);
  out.f.leftCols(p) = data.x().transpose();
  out.f.col(p).setOnes();
  out.f.col(p + 1) = (data.x().transpose() * f.inverse()).cwiseProduct(data.x().transpose()).rowwise().sum();
  out.g = MatrixXd::Zero(p + 2, p + 2);
  out.g.topLeftCorner(p, p) = f.inverse();
  out.g(p, p) = -f.logdet();
  out.g(p, p + 1) = -0.5;
  out.g(p + 1, p) = -0.5;
  return out;
}

double profile_loglik(const Dataset& data, const Partition& partition,
                      const std::vector<MatrixXd>& covariances) {
  if (partition.n() != data.n()) {
    throw DimensionMismatch("profile_loglik: partition size differs from sample count");
  }
  if (static_cast<int>(covariances.size()) != partition.k()) {
    throw DimensionMismatch("profile_loglik: need one covariance per cluster");
  }
  const auto members = partition.members();
  double total = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (members[k].empty()) {
      throw DegeneratePartition("profile_loglik: cluster " + std::to_string(k + 1) + " is empty");
    }
    const linalg::SpdFactor f(covariances[k]);
    const MatrixXd& prec = f.inverse();
    VectorXd sum = VectorXd::Zero(data.p());
    double norms = 0.0;
    for (Index i : members[k]) {
      const auto xi = data.x().col(i);
      norms += xi.dot(prec * xi);
      sum += xi;
    }
    const double size = static_cast<double>(members[k].size());
    // sum_{i,j in G} <X_i, X_j>_P = <sum_i X_i, sum_j X_j>_P
    total += -size * f.logdet() - norms + sum.dot(prec * sum) / size;
  }
  return total;
}

double lifted_objective(const std::vector<MatrixXd>& a_list, const LiftedMembership& z) {
  if (static_cast<int>(a_list.size()) != z.k()) {
    throw DimensionMismatch("lifted_objective: block count mismatch");
  }
  double total = 0.0;
  for (int k = 0; k < z.k(); ++k) {
    total += frobenius_dot(a_list[static_cast<std::size_t>(k)], z.block(k));
  }
  return total;
}

MatrixXd covariance_update_block(const MatrixXd& x, const MatrixXd& zk, double mass_tol) {
  const double mass = zk.sum();
  if (!(mass > mass_tol)) {
    throw EmptySoftCluster("covariance update: block mass 1'Z1 = " + std::to_string(mass));
  }
  return linalg::apply_psd_floor(kernels::scatter(x, zk) / mass);
}

std::vector<MatrixXd> covariance_update(const Dataset& data, const LiftedMembership& z,
                                        double mass_tol) {
  if (z.n() != data.n()) {
    throw DimensionMismatch("covariance_update: Z size differs from sample count");
  }
  std::vector<MatrixXd> out;
  out.reserve(static_cast<std::size_t>(z.k()));
  for (int k = 0; k < z.k(); ++k) {
    try {
      out.push_back(covariance_update_block(data.x(), z.block(k), mass_tol));
    } catch (const EmptySoftCluster& e) {
      throw EmptySoftCluster("block " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return out;
}

SoftDecomposition soft_decomposition(const MatrixXd& x, const MatrixXd& zk, double rank_tol) {
  if (zk.rows() != x.cols() || zk.cols() != x.cols()) {
    throw DimensionMismatch("soft_decomposition: Z_k must be n x n");
  }
  const linalg::SymEigen top = linalg::sym_eigen_top(linalg::symmetrize(zk), 2);
  const Index m = top.values.size();
  const double first = top.values(m - 1);
  if (!(first > 0.0)) {
    throw NotRankOne("soft_decomposition: Z_k has no positive eigenvalue");
  }
  if (m > 1 && std::abs(top.values(0)) > rank_tol * first) {
    throw NotRankOne("soft_decomposition: second eigenvalue " + std::to_string(top.values(0)) +
                     " exceeds rank tolerance");
  }
  // Z_k = a a^T with a = sqrt(first) v; w = (a^T 1) a gives Z_k = w w^T / (w^T 1).
  VectorXd a = std::sqrt(first) * top.vectors.col(m - 1);
  if (a.sum() < 0.0) {
    a = -a;
  }
  SoftDecomposition out;
  out.weights = a.sum() * a;
  const double nk = out.weights.sum();
  out.mean = x * out.weights / nk;
  const MatrixXd centered = x.colwise() - out.mean;
  out.covariance =
      linalg::apply_psd_floor(centered * out.weights.asDiagonal() * centered.transpose() / nk);
  return out;
}

MatrixXd component_log_densities(const MatrixXd& x, const GmmParams& theta) {
  const Index n = x.cols();
  const Index p = x.rows();
  const int k_count = theta.k();
  if (static_cast<int>(theta.covariances.size()) != k_count) {
    throw DimensionMismatch("GMM parameters: means and covariances differ in count");
  }
  const bool weighted = theta.weights.size() == k_count;
  MatrixXd out(n, k_count);
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (int k = 0; k < k_count; ++k) {
    const linalg::SpdFactor f(theta.covariances[static_cast<std::size_t>(k)]);
    const MatrixXd centered = x.colwise() - theta.means[static_cast<std::size_t>(k)];
    const MatrixXd white = f.inv_sqrt() * centered;
    const double log_pi = weighted ? std::log(theta.weights(k)) : -std::log(double(k_count));
    out.col(k) = (-0.5 * (static_cast<double>(p) * log2pi + f.logdet()) + log_pi -
                  0.5 * white.colwise().squaredNorm().array())
                     .transpose();
  }
  return out;
}

double observed_loglik(const Dataset& data, const GmmParams& theta) {
  const MatrixXd logd = component_log_densities(data.x(), theta);
  double total = 0.0;
  for (Index i = 0; i < logd.rows(); ++i) {
    const double top = logd.row(i).maxCoeff();
    if (!std::isfinite(top)) {
      return -std::numeric_limits<double>::infinity();
    }
    total += top + std::log((logd.row(i).array() - top).exp().sum());
  }
  return total;
}

}  // namespace lasdp
