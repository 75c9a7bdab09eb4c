#include "lasdp/enhance.hpp"

#include "lasdp/error.hpp"
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

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) {
    d = kTiny;
  }
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double md = m;
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    const double step = d * c;
    h *= step;
    if (std::abs(step - 1.0) < kEps) {
      break;
    }
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ValidationError("incomplete_beta: parameters must be positive");
  }
  if (std::isnan(x)) {
    return x;
  }
  if (x < 0.0 || x > 1.0) {
    throw ValidationError("incomplete_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (x == 1.0) {
    return 1.0;
  }
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double f_test_pvalue(double f, double d1, double d2) {
  if (std::isnan(f)) {
    return 1.0;
  }
  if (f <= 0.0) {
    return 1.0;
  }
  if (std::isinf(f)) {
    return 0.0;
  }
  return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

AnovaResult anova_f(const MatrixXd& x, const Partition& groups) {
  if (groups.n() != x.cols()) {
    throw DimensionMismatch("anova_f: group labels do not match sample count");
  }
  const Index p = x.rows();
  const Index n = x.cols();
  const std::vector<Index> sizes = groups.sizes();
  const auto nonempty = std::count_if(sizes.begin(), sizes.end(), [](Index s) { return s > 0; });
  const double d1 = static_cast<double>(nonempty - 1);
  const double d2 = static_cast<double>(n - nonempty);
  const MatrixXd means = cluster_means(x, groups);
  const VectorXd grand = x.rowwise().mean();

  AnovaResult out;
  out.f = VectorXd::Zero(p);
  out.p_values = VectorXd::Ones(p);
  out.constant.assign(static_cast<std::size_t>(p), false);
  out.zero_within.assign(static_cast<std::size_t>(p), false);
  for (Index a = 0; a < p; ++a) {
    double between = 0.0;
    for (int g = 0; g < groups.k(); ++g) {
      const double diff = means(a, g) - grand(a);
      between += static_cast<double>(sizes[static_cast<std::size_t>(g)]) * diff * diff;
    }
    double within = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double diff = x(a, i) - means(a, groups[i]);
      within += diff * diff;
    }
    const double scale = std::max(1.0, grand(a) * grand(a)) * static_cast<double>(n);
    const bool no_between = between <= 1e-14 * scale;
    const bool no_within = within <= 1e-14 * scale;
    if (d1 <= 0.0 || d2 <= 0.0 || (no_between && no_within)) {
      out.constant[static_cast<std::size_t>(a)] = no_between && no_within;
      continue;
    }
    if (no_within) {
      out.zero_within[static_cast<std::size_t>(a)] = true;
      out.f(a) = std::numeric_limits<double>::infinity();
      out.p_values(a) = 0.0;
      continue;
    }
    out.f(a) = (between / d1) / (within / d2);
    out.p_values(a) = f_test_pvalue(out.f(a), d1, d2);
  }
  return out;
}

ScreenResult ftest_screen(const Dataset& data, const Partition& groups, int p0, double alpha,
                          double c, std::uint64_t seed) {
  const Index p = data.p();
  if (p0 < 1 || p0 > p) {
    throw ValidationError("ftest_screen: p0 must lie in [1, p]");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("ftest_screen: alpha must lie in [0, 1]");
  }
  if (!(c > 0.0)) {
    throw ValidationError("ftest_screen: C must be positive");
  }
  const AnovaResult anova = anova_f(data.x(), groups);
  ScreenResult out;
  out.p_values = anova.p_values;
  out.flagged.resize(static_cast<std::size_t>(p));
  for (Index a = 0; a < p; ++a) {
    out.flagged[static_cast<std::size_t>(a)] =
        anova.constant[static_cast<std::size_t>(a)] || anova.zero_within[static_cast<std::size_t>(a)];
  }
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index l, Index r) { return anova.p_values(l) < anova.p_values(r); });
  std::vector<char> keep(static_cast<std::size_t>(p), 0);
  for (int m = 0; m < p0; ++m) {
    keep[static_cast<std::size_t>(order[static_cast<std::size_t>(m)])] = 1;
  }
  const double lo = anova.p_values.minCoeff();
  const double hi = anova.p_values.maxCoeff();
  out.clear_cutoff = lo <= 0.0 ? hi > 0.0 : hi / lo >= c;
  if (!out.clear_cutoff) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(alpha);
    for (std::size_t m = static_cast<std::size_t>(p0); m < order.size(); ++m) {
      if (coin(rng)) {
        keep[static_cast<std::size_t>(order[m])] = 1;
      }
    }
  }
  for (Index a = 0; a < p; ++a) {
    if (keep[static_cast<std::size_t>(a)]) {
      out.selected.push_back(a);
    }
  }
  return out;
}

ScreenResult ftest_screen(const Dataset& data, int k, int p0, double alpha, double c,
                          std::uint64_t seed, Linkage linkage) {
  return ftest_screen(data, hierarchical(data.x(), k, linkage), p0, alpha, c, seed);
}

MatrixXd pooled_within(const MatrixXd& x, const Partition& groups) {
  const MatrixXd means = cluster_means(x, groups);
  MatrixXd centered(x.rows(), x.cols());
  for (Index i = 0; i < x.cols(); ++i) {
    centered.col(i) = x.col(i) - means.col(groups[i]);
  }
  return centered * centered.transpose() / static_cast<double>(x.cols());
}

MatrixXd lda_directions(const MatrixXd& x, const Partition& groups, int q, MatrixXd* within) {
  const Index p = x.rows();
  if (q < 1 || q > p) {
    throw ValidationError("lda: number of directions must lie in [1, p]");
  }
  const MatrixXd w = linalg::apply_psd_floor(pooled_within(x, groups));
  const linalg::SpdFactor wf(w);
  const MatrixXd means = cluster_means(x, groups);
  const VectorXd grand = x.rowwise().mean();
  const std::vector<Index> sizes = groups.sizes();
  MatrixXd between = MatrixXd::Zero(p, p);
  for (int g = 0; g < groups.k(); ++g) {
    const VectorXd d = means.col(g) - grand;
    between += static_cast<double>(sizes[static_cast<std::size_t>(g)]) * d * d.transpose();
  }
  between /= static_cast<double>(x.cols());
  const MatrixXd whitened = linalg::symmetrize(wf.inv_sqrt() * between * wf.inv_sqrt());
  const linalg::SymEigen top = linalg::sym_eigen_top(whitened, q);
  MatrixXd dirs(p, q);
  for (int j = 0; j < q; ++j) {
    VectorXd v = wf.inv_sqrt() * top.vectors.col(q - 1 - j);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) {
      v = -v;
    }
    dirs.col(j) = v;
  }
  if (within != nullptr) {
    *within = w;
  }
  return dirs;
}

LdaResult lda_reduce(const Dataset& data, int k_min, int k_max, int k, Linkage linkage) {
  const Index p = data.p();
  if (!(k <= k_min && k_min <= k_max && k_max <= p)) {
    throw ValidationError("lda_reduce: need k <= K~min <= K~max <= p");
  }
  if (k_min < 2) {
    throw ValidationError("lda_reduce: K~ must be at least 2");
  }
  const MatrixXd& x = data.x();
  const std::vector<Merge> tree = agglomerate(x, linkage);
  LdaResult out;
  double best = -std::numeric_limits<double>::infinity();
  Partition best_groups;
  for (int kt = k_min; kt <= k_max; ++kt) {
    const Partition groups = cut_tree(data.n(), tree, kt);
    const linalg::SpdFactor wf(linalg::apply_psd_floor(pooled_within(x, groups)));
    const MatrixXd means = cluster_means(x, groups);
    double snr = std::numeric_limits<double>::infinity();
    for (int a = 0; a < kt; ++a) {
      for (int b = a + 1; b < kt; ++b) {
        snr = std::min(snr, (wf.inv_sqrt() * (means.col(a) - means.col(b))).norm());
      }
    }
    out.snr.push_back(snr);
    if (snr >= best) {
      best = snr;
      out.k_tilde = kt;
      best_groups = groups;
    }
  }
  out.directions = lda_directions(x, best_groups, out.k_tilde - 1, &out.within);
  out.transformed = out.directions.transpose() * x;
  return out;
}

SketchResult sketch_and_lift(const Dataset& data, int k, double gamma, const IlasdpConfig& cfg,
                             std::uint64_t seed, Linkage linkage) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ValidationError("sketch_and_lift: gamma must lie in (0, 1]");
  }
  const Index n = data.n();
  constexpr int kMaxAttempts = 5;
  SketchResult out;
  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    out.attempts = attempt;
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::bernoulli_distribution coin(gamma);
    std::vector<Index> sketch;
    std::vector<Index> held;
    for (Index i = 0; i < n; ++i) {
      (gamma >= 1.0 || coin(rng) ? sketch : held).push_back(i);
    }
    if (static_cast<Index>(sketch.size()) < std::max<Index>(k, 2)) {
      continue;
    }
    const Dataset v = gamma >= 1.0 ? data : data.subset(sketch);
    LasdpResult fit;
    try {
      fit = ilasdp(v, hierarchical(v.x(), k, linkage), cfg);
    } catch (const DegeneratePartition&) {
      continue;
    } catch (const EmptySoftCluster&) {
      continue;
    }
    if (fit.partition.has_empty_cluster()) {
      continue;
    }

    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    for (std::size_t j = 0; j < sketch.size(); ++j) {
      labels[static_cast<std::size_t>(sketch[j])] = fit.partition[static_cast<Index>(j)];
    }
    if (!held.empty()) {
      const MatrixXd centers = cluster_means(v.x(), fit.partition);
      const std::vector<MatrixXd> covs = init_cov_from_partition(v, fit.partition);
      std::vector<linalg::SpdFactor> factors;
      for (const auto& s : covs) {
        factors.emplace_back(s);
      }
      std::uniform_int_distribution<int> any(0, k - 1);
      for (Index i : held) {
        VectorXd score(k);
        for (int c = 0; c < k; ++c) {
          const VectorXd diff = data.x().col(i) - centers.col(c);
          score(c) = factors[static_cast<std::size_t>(c)].logdet() +
                     (factors[static_cast<std::size_t>(c)].inv_sqrt() * diff).squaredNorm();
        }
        Index arg = 0;
        const double lo = score.minCoeff(&arg);
        const auto ties = (score.array() == lo).count();
        if (ties == 1) {
          labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
        } else {
          labels[static_cast<std::size_t>(i)] = any(rng);
          ++out.random_assignments;
        }
      }
    }
    out.partition = Partition(std::move(labels), k);
    out.sketch = std::move(sketch);
    out.sketch_fit = std::move(fit);
    return out;
  }
  throw DegeneratePartition("sketch_and_lift: no usable sketch after " +
                            std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace lasdp
