#include "lasdp/baselines.hpp"

#include "lasdp/error.hpp"
#include "lasdp/kernels.hpp"
#include "lasdp/linalg.hpp"
#include "lasdp/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace lasdp {

namespace {

void check_k(Index n, int k, const char* who) {
  if (k < 1) {
    throw ValidationError(std::string(who) + ": k must be >= 1");
  }
  if (n < k) {
    throw ValidationError(std::string(who) + ": need at least k samples");
  }
}

MatrixXd plus_plus_seeds(const MatrixXd& x, int k, std::mt19937_64& rng) {
  const Index n = x.cols();
  MatrixXd centers(x.rows(), k);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.col(0) = x.col(pick(rng));
  VectorXd d2 = (x.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index chosen = 0;
    if (total > 0.0) {
      double target = unif(rng) * total;
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.col(c) = x.col(chosen);
    d2 = d2.cwiseMin((x.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
  }
  return centers;
}

}  // namespace

MatrixXd cluster_means(const MatrixXd& x, const Partition& partition) {
  MatrixXd means = MatrixXd::Zero(x.rows(), partition.k());
  VectorXd counts = VectorXd::Zero(partition.k());
  for (Index i = 0; i < x.cols(); ++i) {
    means.col(partition[i]) += x.col(i);
    counts(partition[i]) += 1.0;
  }
  for (int c = 0; c < partition.k(); ++c) {
    if (counts(c) > 0.0) {
      means.col(c) /= counts(c);
    }
  }
  return means;
}

KmeansResult lloyd(const MatrixXd& x, MatrixXd centers, int max_iters,
                   std::vector<double>* inertia_trace) {
  const Index n = x.cols();
  const int k = static_cast<int>(centers.cols());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  VectorXd d2(n);
  KmeansResult out;
  for (int it = 1; it <= max_iters; ++it) {
    std::vector<int> before = labels;
    kernels::assign_nearest(x, centers, labels, d2);
    out.iterations = it;
    if (inertia_trace != nullptr) {
      inertia_trace->push_back(d2.sum());
    }
    // Reseed empty clusters at the currently worst-fit point.
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) {
      ++counts[static_cast<std::size_t>(l)];
    }
    bool repaired = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        continue;
      }
      Index far = 0;
      d2.maxCoeff(&far);
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      ++counts[static_cast<std::size_t>(c)];
      d2(far) = 0.0;
      repaired = true;
    }
    centers = cluster_means(x, Partition(labels, k));
    if (!repaired && labels == before) {
      break;
    }
  }
  kernels::assign_nearest(x, centers, labels, d2);
  out.partition = Partition(std::move(labels), k);
  out.centers = std::move(centers);
  out.inertia = d2.sum();
  return out;
}

KmeansResult kmeans(const MatrixXd& x, int k, std::uint64_t seed, int n_restarts, int max_iters) {
  check_k(x.cols(), k, "kmeans");
  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, n_restarts); ++r) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    KmeansResult cur = lloyd(x, plus_plus_seeds(x, k, rng), max_iters);
    if (cur.inertia < best.inertia) {
      best = std::move(cur);
    }
  }
  return best;
}

std::vector<int> argmax_rows(const MatrixXd& scores) {
  std::vector<int> labels(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) {
        best = c;
      }
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

namespace {

// Row-wise log-sum-exp normalization; returns the log-likelihood.
double posteriors(const MatrixXd& logd, MatrixXd& tau) {
  tau.resize(logd.rows(), logd.cols());
  double total = 0.0;
  for (Index i = 0; i < logd.rows(); ++i) {
    const double top = logd.row(i).maxCoeff();
    const double lse = top + std::log((logd.row(i).array() - top).exp().sum());
    tau.row(i) = (logd.row(i).array() - lse).exp();
    total += lse;
  }
  return total;
}

GmmParams m_step(const MatrixXd& x, const MatrixXd& tau, const GmmParams& previous) {
  const Index n = x.cols();
  const int k = static_cast<int>(tau.cols());
  GmmParams out;
  out.weights.resize(k);
  for (int c = 0; c < k; ++c) {
    const double nk = tau.col(c).sum();
    if (!(nk > 1e-10) && previous.k() == k) {
      out.means.push_back(previous.means[static_cast<std::size_t>(c)]);
      out.covariances.push_back(previous.covariances[static_cast<std::size_t>(c)]);
      out.weights(c) = nk / static_cast<double>(n);
      continue;
    }
    if (!(nk > 0.0)) {
      throw DegeneratePartition("EM: component " + std::to_string(c + 1) + " has no mass");
    }
    const VectorXd mean = x * tau.col(c) / nk;
    const MatrixXd centered = x.colwise() - mean;
    const MatrixXd cov = centered * tau.col(c).asDiagonal() * centered.transpose() / nk;
    out.means.push_back(mean);
    out.covariances.push_back(linalg::apply_psd_floor(cov));
    out.weights(c) = nk / static_cast<double>(n);
  }
  out.weights = out.weights.cwiseMax(1e-300);
  out.weights /= out.weights.sum();
  return out;
}

}  // namespace

EmResult em_gmm(const Dataset& data, int k, const Partition& init, int max_iters, double tol) {
  check_k(data.n(), k, "em_gmm");
  if (init.n() != data.n() || init.k() != k) {
    throw DimensionMismatch("em_gmm: init partition does not match data or k");
  }
  if (init.has_empty_cluster()) {
    throw DegeneratePartition("em_gmm: init partition has an empty cluster");
  }
  const MatrixXd& x = data.x();
  MatrixXd tau = assignment_matrix(init);
  EmResult out;
  out.params = m_step(x, tau, GmmParams{});
  double last = -std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iters; ++it) {
    const double ll = posteriors(component_log_densities(x, out.params), tau);
    out.loglik_trace.push_back(ll);
    out.iterations = it;
    if (std::isfinite(last) && std::abs(ll - last) < tol * std::abs(last)) {
      out.converged = true;
      break;
    }
    last = ll;
    out.params = m_step(x, tau, out.params);
  }
  out.partition = Partition(argmax_rows(component_log_densities(x, out.params)), k);
  return out;
}

EmResult mem(const Dataset& data, int k, std::uint64_t seed, int max_iters, double tol) {
  check_k(data.n(), k, "mem");
  const MatrixXd& x = data.x();
  const Index n = data.n();
  std::mt19937_64 rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  EmResult out;
  out.params.weights = VectorXd::Constant(k, 1.0 / k);
  for (int c = 0; c < k; ++c) {
    out.params.means.push_back(x.col(order[static_cast<std::size_t>(c)]));
    out.params.covariances.push_back(MatrixXd::Identity(data.p(), data.p()));
  }
  MatrixXd tau;
  double last = -std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iters; ++it) {
    const double ll = posteriors(component_log_densities(x, out.params), tau);
    out.loglik_trace.push_back(ll);
    out.iterations = it;
    if (std::isfinite(last) && std::abs(ll - last) < tol * std::abs(last)) {
      out.converged = true;
      break;
    }
    last = ll;
    for (int c = 0; c < k; ++c) {
      const double nk = tau.col(c).sum();
      if (nk > 1e-300) {
        out.params.means[static_cast<std::size_t>(c)] = x * tau.col(c) / nk;
      }
    }
  }
  out.partition = Partition(argmax_rows(component_log_densities(x, out.params)), k);
  return out;
}

std::string_view to_string(Linkage l) {
  switch (l) {
    case Linkage::kWard:
      return "ward";
    case Linkage::kSingle:
      return "single";
    case Linkage::kComplete:
      return "complete";
    case Linkage::kAverage:
      return "average";
  }
  return "ward";
}

Linkage linkage_from_string(std::string_view name) {
  for (Linkage l : {Linkage::kWard, Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
    if (to_string(l) == name) {
      return l;
    }
  }
  throw ValidationError("unknown linkage '" + std::string(name) +
                        "' (expected ward|single|complete|average)");
}

std::vector<Merge> agglomerate(const MatrixXd& x, Linkage linkage) {
  const Index n = x.cols();
  MatrixXd d = kernels::pairwise_sq_dists(x);
  if (linkage != Linkage::kWard) {
    d = d.cwiseSqrt();
  }
  std::vector<double> size(static_cast<std::size_t>(n), 1.0);
  std::vector<char> active(static_cast<std::size_t>(n), 1);
  std::vector<Merge> merges;
  merges.reserve(static_cast<std::size_t>(std::max<Index>(n - 1, 0)));
  std::vector<Index> chain;
  Index remaining = n;

  while (remaining > 1) {
    if (chain.empty()) {
      for (Index i = 0; i < n; ++i) {
        if (active[static_cast<std::size_t>(i)]) {
          chain.push_back(i);
          break;
        }
      }
    }
    const Index a = chain.back();
    const Index prev = chain.size() >= 2 ? chain[chain.size() - 2] : -1;
    Index b = -1;
    double best = std::numeric_limits<double>::infinity();
    if (prev >= 0) {
      b = prev;
      best = d(a, prev);
    }
    for (Index c = 0; c < n; ++c) {
      if (c == a || !active[static_cast<std::size_t>(c)]) {
        continue;
      }
      if (d(a, c) < best) {
        best = d(a, c);
        b = c;
      }
    }
    if (b != prev) {
      chain.push_back(b);
      continue;
    }
    chain.pop_back();
    chain.pop_back();
    // Keep the merged cluster in the slot of its smallest member.
    const Index keep = std::min(a, b);
    const Index drop = std::max(a, b);
    merges.push_back({keep, drop, best});
    const double na = size[static_cast<std::size_t>(keep)];
    const double nb = size[static_cast<std::size_t>(drop)];
    for (Index c = 0; c < n; ++c) {
      if (c == keep || c == drop || !active[static_cast<std::size_t>(c)]) {
        continue;
      }
      const double dk = d(keep, c);
      const double dd = d(drop, c);
      double v = 0.0;
      switch (linkage) {
        case Linkage::kWard: {
          const double nc = size[static_cast<std::size_t>(c)];
          v = ((na + nc) * dk + (nb + nc) * dd - nc * best) / (na + nb + nc);
          break;
        }
        case Linkage::kSingle:
          v = std::min(dk, dd);
          break;
        case Linkage::kComplete:
          v = std::max(dk, dd);
          break;
        case Linkage::kAverage:
          v = (na * dk + nb * dd) / (na + nb);
          break;
      }
      d(keep, c) = v;
      d(c, keep) = v;
    }
    size[static_cast<std::size_t>(keep)] = na + nb;
    active[static_cast<std::size_t>(drop)] = 0;
    --remaining;
  }
  std::stable_sort(merges.begin(), merges.end(),
                   [](const Merge& l, const Merge& r) { return l.height < r.height; });
  return merges;
}

Partition cut_tree(Index n, const std::vector<Merge>& merges, int k) {
  check_k(n, k, "cut_tree");
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  const std::size_t steps = static_cast<std::size_t>(n - k);
  for (std::size_t m = 0; m < steps && m < merges.size(); ++m) {
    const Index ra = find(merges[m].a);
    const Index rb = find(merges[m].b);
    parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
  }
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> root_label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    if (root_label[static_cast<std::size_t>(r)] < 0) {
      root_label[static_cast<std::size_t>(r)] = next++;
    }
    labels[static_cast<std::size_t>(i)] = root_label[static_cast<std::size_t>(r)];
  }
  return Partition(std::move(labels), k);
}

Partition hierarchical(const MatrixXd& x, int k, Linkage linkage) {
  check_k(x.cols(), k, "hierarchical");
  return cut_tree(x.cols(), agglomerate(x, linkage), k);
}

Partition spectral_clustering(const MatrixXd& x, int k, std::uint64_t seed) {
  const Index n = x.cols();
  check_k(n, k, "spectral_clustering");
  if (k == 1) {
    return Partition(std::vector<int>(static_cast<std::size_t>(n), 0), 1);
  }
  const MatrixXd d2 = kernels::pairwise_sq_dists(x);
  std::vector<double> upper;
  upper.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      upper.push_back(std::sqrt(d2(i, j)));
    }
  }
  auto mid = upper.begin() + static_cast<std::ptrdiff_t>(upper.size() / 2);
  std::nth_element(upper.begin(), mid, upper.end());
  double sigma = *mid;
  if (!(sigma > 0.0)) {
    sigma = 1.0;
  }
  MatrixXd w = (-d2.array() / (2.0 * sigma * sigma)).exp().matrix();
  w.diagonal().setZero();
  const VectorXd deg = w.rowwise().sum().array() + 1e-10;
  const VectorXd inv_sqrt = deg.cwiseSqrt().cwiseInverse();
  const MatrixXd norm = inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal();
  const linalg::SymEigen top = linalg::sym_eigen_top(linalg::symmetrize(norm), k);
  MatrixXd emb = top.vectors.transpose();  // k x n, samples as columns
  for (Index i = 0; i < n; ++i) {
    const double len = emb.col(i).norm();
    if (len > 0.0) {
      emb.col(i) /= len;
    }
  }
  return kmeans(emb, k, seed).partition;
}

Partition perturb_labels(const Partition& partition, double alpha, std::uint64_t seed) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("perturbation fraction must lie in [0, 1]");
  }
  const Index n = partition.n();
  const auto count = static_cast<Index>(std::floor(alpha * static_cast<double>(n)));
  std::mt19937_64 rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> draw(0, partition.k() - 1);
  std::vector<int> labels = partition.labels();
  for (Index m = 0; m < count; ++m) {
    labels[static_cast<std::size_t>(order[static_cast<std::size_t>(m)])] = draw(rng);
  }
  return Partition(std::move(labels), partition.k());
}

Partition merge_to_k(const MatrixXd& x, const Partition& partition, int k) {
  if (k < 1 || k > partition.k()) {
    throw ValidationError("merge_to_k: target k must be in [1, current k]");
  }
  std::vector<int> labels = partition.labels();
  int current = partition.k();
  while (current > k) {
    const MatrixXd means = cluster_means(x, Partition(labels, current));
    const std::vector<Index> sizes = Partition(labels, current).sizes();
    int best_a = 0;
    int best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < current; ++a) {
      for (int b = a + 1; b < current; ++b) {
        // Empty clusters are absorbed first.
        const bool empty = sizes[static_cast<std::size_t>(a)] == 0 ||
                           sizes[static_cast<std::size_t>(b)] == 0;
        const double dist = empty ? -1.0 : (means.col(a) - means.col(b)).squaredNorm();
        if (dist < best) {
          best = dist;
          best_a = a;
          best_b = b;
        }
      }
    }
    for (int& l : labels) {
      if (l == best_b) {
        l = best_a;
      } else if (l > best_b) {
        --l;
      }
    }
    --current;
  }
  return Partition(std::move(labels), k);
}

Partition random_partition(Index n, int k, std::uint64_t seed) {
  check_k(n, k, "random_partition");
  std::mt19937_64 rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> draw(0, k - 1);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index m = 0; m < n; ++m) {
    labels[static_cast<std::size_t>(order[static_cast<std::size_t>(m)])] =
        m < k ? static_cast<int>(m) : draw(rng);
  }
  return Partition(std::move(labels), k);
}

}  // namespace lasdp
