#pragma once

// Comparator clustering methods: Lloyd/K-means++, EM for heterogeneous GMMs,
// mean-only EM (mEM), agglomerative hierarchical clustering and normalized
// spectral clustering, plus the label perturbation used in robustness runs.

#include "lasdp/core.hpp"
#include "lasdp/likelihood.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace lasdp {

struct KmeansResult {
  Partition partition;
  MatrixXd centers;  // p x k
  /// Within-cluster sum of squares.
  double inertia = 0.0;
  int iterations = 0;
};

/// Lloyd's algorithm from K-means++ seeds, best of n_restarts by inertia.
/// Points are the columns of x. Empty clusters are reseeded to the point
/// farthest from its center.
KmeansResult kmeans(const MatrixXd& x, int k, std::uint64_t seed, int n_restarts = 10,
                    int max_iters = 300);

/// Lloyd iterations from given centers; inertia_trace receives one value per step.
KmeansResult lloyd(const MatrixXd& x, MatrixXd centers, int max_iters,
                   std::vector<double>* inertia_trace = nullptr);

struct EmResult {
  Partition partition;
  GmmParams params;
  /// Observed-data log-likelihood after every E-step.
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
};

/// Full EM (weights, means, covariances) started from the M-step of `init`.
/// Stops when the relative log-likelihood change drops below tol.
EmResult em_gmm(const Dataset& data, int k, const Partition& init, int max_iters = 500,
                double tol = 1e-8);

/// EM with identity covariances and equal weights held fixed, centers started
/// at k distinct data points drawn uniformly.
EmResult mem(const Dataset& data, int k, std::uint64_t seed, int max_iters = 500,
             double tol = 1e-8);

/// Hard labels argmax_k of the rows of an n x K score matrix; ties to the smallest k.
std::vector<int> argmax_rows(const MatrixXd& scores);

enum class Linkage { kWard, kSingle, kComplete, kAverage };

std::string_view to_string(Linkage l);
Linkage linkage_from_string(std::string_view name);

/// One agglomeration step: clusters a and b (each named by its smallest
/// member) joined at `height`.
struct Merge {
  Index a = 0;
  Index b = 0;
  double height = 0.0;
};

/// n - 1 merges in nondecreasing height order (nearest-neighbor chain with
/// Lance-Williams updates; Ward works on squared Euclidean distances).
std::vector<Merge> agglomerate(const MatrixXd& x, Linkage linkage = Linkage::kWard);
/// Cut the tree at k clusters; labels numbered by first appearance.
Partition cut_tree(Index n, const std::vector<Merge>& merges, int k);
Partition hierarchical(const MatrixXd& x, int k, Linkage linkage = Linkage::kWard);

/// Gaussian affinity with median-distance bandwidth, normalized Laplacian
/// eigenvectors (row-normalized), then K-means.
Partition spectral_clustering(const MatrixXd& x, int k, std::uint64_t seed);

/// floor(alpha n) indices chosen uniformly get labels redrawn uniformly from [k].
Partition perturb_labels(const Partition& partition, double alpha, std::uint64_t seed);

/// Repeatedly merge the two clusters with the nearest centroids until k remain.
Partition merge_to_k(const MatrixXd& x, const Partition& partition, int k);

/// Uniform random labels with every cluster nonempty.
Partition random_partition(Index n, int k, std::uint64_t seed);

/// Cluster means (p x k columns) of a partition; empty clusters give zero columns.
MatrixXd cluster_means(const MatrixXd& x, const Partition& partition);

}  // namespace lasdp
