#include "lasdp/generators.hpp"

#include "lasdp/error.hpp"
#include "lasdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace lasdp {

namespace {

constexpr std::pair<Family, std::string_view> kNames[] = {
    {Family::kCommonCond, "common-cond"},
    {Family::kHeteroSimplex, "hetero-simplex"},
    {Family::kEmAdversarial, "em-adversarial"},
    {Family::kRandomCov, "random-cov"},
    {Family::kSampleComplexity, "sample-complexity"},
};

MatrixXd random_orthogonal(Index p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd g(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      g(i, j) = normal(rng);
    }
  }
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  // Sign fix makes the draw Haar distributed.
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

MatrixXd hetero_cov(Index p, int k, int c, double cond) {
  MatrixXd s = MatrixXd::Identity(p, p);
  const Index axis = (c + 1) % k;
  s(axis, axis) = cond;
  return s;
}

}  // namespace

std::string_view to_string(Family f) {
  for (const auto& [fam, name] : kNames) {
    if (fam == f) {
      return name;
    }
  }
  return "common-cond";
}

Family family_from_string(std::string_view name) {
  for (const auto& [fam, n] : kNames) {
    if (n == name) {
      return fam;
    }
  }
  throw ValidationError("unknown family '" + std::string(name) +
                        "' (expected common-cond|hetero-simplex|em-adversarial|random-cov|"
                        "sample-complexity)");
}

void GeneratorSpec::validate() const {
  if (k < 1 || n < k) {
    throw ValidationError("generator: need 1 <= k <= n");
  }
  if (p < 1) {
    throw ValidationError("generator: need p >= 1");
  }
  switch (family) {
    case Family::kCommonCond:
      if (k > p) {
        throw ValidationError("common-cond: needs k <= p");
      }
      if (!(cond >= 0.0)) {
        throw ValidationError("common-cond: needs L >= 0");
      }
      break;
    case Family::kHeteroSimplex:
    case Family::kSampleComplexity:
      if (k > p) {
        throw ValidationError(std::string(to_string(family)) + ": needs k <= p");
      }
      if (!(cond > 0.0)) {
        throw ValidationError(std::string(to_string(family)) + ": needs L > 0");
      }
      if (family == Family::kSampleComplexity && n < 2) {
        throw ValidationError("sample-complexity: needs n >= 2");
      }
      break;
    case Family::kEmAdversarial:
      if (p != 1 || k != 3) {
        throw ValidationError("em-adversarial: needs p = 1 and k = 3");
      }
      break;
    case Family::kRandomCov:
      if (k > p) {
        throw ValidationError("random-cov: needs k <= p");
      }
      if (!(beta >= 0.0)) {
        throw ValidationError("random-cov: needs beta >= 0");
      }
      break;
  }
  if (!std::isfinite(lambda) || !std::isfinite(gamma)) {
    throw ValidationError("generator: separation parameters must be finite");
  }
}

GmmParams family_params(const GeneratorSpec& spec) {
  spec.validate();
  const Index p = spec.p;
  const int k = spec.k;
  GmmParams out;
  out.weights = VectorXd::Constant(k, 1.0 / k);
  switch (spec.family) {
    case Family::kCommonCond: {
      const double scale = spec.lambda / std::sqrt(1.0 + 1.0 / (1.0 + spec.cond));
      MatrixXd s = MatrixXd::Identity(p, p);
      s(0, 0) += spec.cond;
      for (int c = 0; c < k; ++c) {
        out.means.push_back(scale * VectorXd::Unit(p, c));
        out.covariances.push_back(s);
      }
      break;
    }
    case Family::kHeteroSimplex:
    case Family::kSampleComplexity: {
      double scale = spec.lambda;
      if (spec.family == Family::kSampleComplexity) {
        scale *= std::sqrt(std::log(static_cast<double>(spec.n)));
      }
      for (int c = 0; c < k; ++c) {
        out.means.push_back(scale * VectorXd::Unit(p, c));
        out.covariances.push_back(hetero_cov(p, k, c, spec.cond));
      }
      break;
    }
    case Family::kEmAdversarial: {
      for (double m : {spec.gamma, -spec.gamma, 10.0 * spec.gamma}) {
        out.means.push_back(VectorXd::Constant(1, m));
        out.covariances.push_back(MatrixXd::Identity(1, 1));
      }
      break;
    }
    case Family::kRandomCov: {
      std::mt19937_64 rng(spec.cov_seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (int c = 0; c < k; ++c) {
        const MatrixXd u = random_orthogonal(p, rng);
        VectorXd lam(p);
        for (Index i = 0; i < p; ++i) {
          const double z = normal(rng);
          lam(i) = 1.0 + spec.beta * z * (z > 0.0 ? 1.0 : 0.0);
        }
        out.means.push_back(spec.lambda * VectorXd::Unit(p, c));
        out.covariances.push_back(linalg::symmetrize(u * lam.asDiagonal() * u.transpose()));
      }
      break;
    }
  }
  return out;
}

std::vector<Index> balanced_sizes(Index n, int k) {
  std::vector<Index> sizes(static_cast<std::size_t>(k), n / k);
  for (Index r = 0; r < n % k; ++r) {
    ++sizes[static_cast<std::size_t>(r)];
  }
  return sizes;
}

Dataset generate(const GeneratorSpec& spec) {
  const GmmParams theta = family_params(spec);
  const std::vector<Index> sizes = balanced_sizes(spec.n, spec.k);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd x(spec.p, spec.n);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(spec.n));
  Index col = 0;
  for (int c = 0; c < spec.k; ++c) {
    const MatrixXd root = theta.covariances[static_cast<std::size_t>(c)].llt().matrixL();
    for (Index m = 0; m < sizes[static_cast<std::size_t>(c)]; ++m, ++col) {
      VectorXd z(spec.p);
      for (Index i = 0; i < spec.p; ++i) {
        z(i) = normal(rng);
      }
      x.col(col) = theta.means[static_cast<std::size_t>(c)] + root * z;
      labels.push_back(c);
    }
  }
  return Dataset(std::move(x), std::move(labels));
}

double logit_transform(double x) {
  const double c = std::clamp(x, 1e-6, 1.0 - 1e-6);
  return std::log(1.0 / c - 1.0);
}

MatrixXd range_logit_transform(const MatrixXd& x) {
  MatrixXd out(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    const double lo = x.row(i).minCoeff();
    const double hi = x.row(i).maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    for (Index j = 0; j < x.cols(); ++j) {
      out(i, j) = logit_transform((x(i, j) - lo) / span);
    }
  }
  return out;
}

}  // namespace lasdp
