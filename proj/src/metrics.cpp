#include "lasdp/metrics.hpp"

#include "lasdp/error.hpp"
#include "lasdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lasdp {

std::vector<int> max_weight_assignment(const MatrixXd& weight) {
  if (weight.rows() != weight.cols()) {
    throw DimensionMismatch("assignment: weight matrix must be square");
  }
  const int n = static_cast<int>(weight.rows());
  if (n == 0) {
    return {};
  }
  // Shortest augmenting path formulation on cost = -weight, 1-based potentials.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int r0 = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= n; ++col) {
        if (used[col]) {
          continue;
        }
        const double cur = -weight(r0 - 1, col - 1) - u[r0] - v[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int col = 1; col <= n; ++col) {
    out[static_cast<std::size_t>(match[col] - 1)] = col - 1;
  }
  return out;
}

MatrixXd confusion_matrix(const Partition& est, const Partition& truth) {
  if (est.n() != truth.n()) {
    throw DimensionMismatch("misclustering_error: label sequences differ in length");
  }
  const int k = std::max(est.k(), truth.k());
  MatrixXd c = MatrixXd::Zero(k, k);
  for (Index i = 0; i < est.n(); ++i) {
    c(est[i], truth[i]) += 1.0;
  }
  return c;
}

double misclustering_error(const Partition& est, const Partition& truth) {
  if (est.n() == 0) {
    return 0.0;
  }
  const MatrixXd c = confusion_matrix(est, truth);
  const std::vector<int> match = max_weight_assignment(c);
  double agree = 0.0;
  for (std::size_t r = 0; r < match.size(); ++r) {
    agree += c(static_cast<Index>(r), match[r]);
  }
  // Count-based so the result is an exact ratio of integers.
  return (static_cast<double>(est.n()) - agree) / static_cast<double>(est.n());
}

double SeparationDiagnostics::delta() const { return std::sqrt(delta_sq); }

double SeparationDiagnostics::d_min() const {
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < d.rows(); ++k) {
    for (Index l = 0; l < d.cols(); ++l) {
      if (k != l) {
        best = std::min(best, d(k, l));
      }
    }
  }
  return std::isfinite(best) ? best : 0.0;
}

SeparationDiagnostics separation_diagnostics(const std::vector<VectorXd>& means,
                                             const std::vector<MatrixXd>& covariances,
                                             const std::vector<Index>& cluster_sizes) {
  const std::size_t k_count = means.size();
  if (covariances.size() != k_count || cluster_sizes.size() != k_count) {
    throw DimensionMismatch("separation_diagnostics: means, covariances and sizes differ in count");
  }
  std::vector<linalg::SpdFactor> factors;
  factors.reserve(k_count);
  for (const auto& s : covariances) {
    factors.emplace_back(s);
  }
  SeparationDiagnostics out;
  out.d = MatrixXd::Zero(static_cast<Index>(k_count), static_cast<Index>(k_count));
  out.delta_sq = k_count < 2 ? 0.0 : std::numeric_limits<double>::infinity();
  out.small_m = k_count < 2 ? 0.0 : std::numeric_limits<double>::infinity();
  out.min_size = k_count == 0 ? 0 : *std::min_element(cluster_sizes.begin(), cluster_sizes.end());
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t l = 0; l < k_count; ++l) {
      if (k == l) {
        continue;
      }
      const VectorXd diff = factors[k].inv_sqrt() * (means[k] - means[l]);
      out.delta_sq = std::min(out.delta_sq, diff.squaredNorm());

      const MatrixXd& root_l = factors[l].sqrt();
      const MatrixXd ratio = linalg::symmetrize(root_l * factors[k].inverse() * root_l);
      const VectorXd eig = linalg::sym_eigenvalues(ratio);
      out.big_m = std::max(out.big_m, eig.cwiseAbs().maxCoeff());
      const VectorXd lam = eig.array() - 1.0;
      const double scale = lam.cwiseAbs().maxCoeff();
      if (scale > 0.0) {
        const double sum = (lam.array() - (1.0 + lam.array()).log()).sum();
        out.d(static_cast<Index>(k), static_cast<Index>(l)) =
            sum / (static_cast<double>(lam.size()) * scale);
      }

      const double nk = static_cast<double>(cluster_sizes[k]);
      const double nl = static_cast<double>(cluster_sizes[l]);
      if (nk + nl > 0.0) {
        out.small_m = std::min(out.small_m, 2.0 * nk * nl / (nk + nl));
      }
    }
  }
  return out;
}

}  // namespace lasdp
