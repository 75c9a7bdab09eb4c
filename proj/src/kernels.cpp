#include "lasdp/kernels.hpp"

#include "lasdp/error.hpp"
#include "lasdp/linalg.hpp"

#include <limits>

namespace lasdp::kernels {

namespace {

void check_square(const MatrixXd& m, Index size, const char* what) {
  if (m.rows() != size || m.cols() != size) {
    throw DimensionMismatch(what);
  }
}

void assemble_similarity(MatrixXd& g, double logdet) {
  const VectorXd v = g.diagonal();
  const Index n = g.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      g(i, j) += -logdet - 0.5 * (v(i) + v(j));
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- serial

namespace serial {

MatrixXd quadratic_gram(const MatrixXd& x, const MatrixXd& p) {
  check_square(p, x.rows(), "quadratic_gram: precision must be p x p");
  const Index n = x.cols();
  const Index dim = x.rows();
  MatrixXd g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Index a = 0; a < dim; ++a) {
        for (Index b = 0; b < dim; ++b) {
          acc += x(a, i) * p(a, b) * x(b, j);
        }
      }
      g(i, j) = acc;
    }
  }
  return g;
}

MatrixXd similarity(const MatrixXd& x, const MatrixXd& precision, double logdet) {
  MatrixXd g = quadratic_gram(x, precision);
  assemble_similarity(g, logdet);
  return g;
}

MatrixXd scatter(const MatrixXd& x, const MatrixXd& z) {
  check_square(z, x.cols(), "scatter: Z must be n x n");
  const Index n = x.cols();
  const Index dim = x.rows();
  MatrixXd s = MatrixXd::Zero(dim, dim);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double w = z(i, j);
      if (w == 0.0) {
        continue;
      }
      for (Index a = 0; a < dim; ++a) {
        for (Index b = 0; b < dim; ++b) {
          s(a, b) += w * (0.5 * (x(a, i) * x(b, i) + x(a, j) * x(b, j)) - x(a, i) * x(b, j));
        }
      }
    }
  }
  return linalg::symmetrize(s);
}

MatrixXd pairwise_sq_dists(const MatrixXd& x) {
  const Index n = x.cols();
  MatrixXd d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      d(i, j) = (x.col(i) - x.col(j)).squaredNorm();
    }
  }
  return d;
}

void assign_nearest(const MatrixXd& x, const MatrixXd& c, std::vector<int>& labels,
                    VectorXd& sq_dist) {
  const Index n = x.cols();
  labels.assign(static_cast<std::size_t>(n), 0);
  sq_dist.resize(n);
  for (Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Index k = 0; k < c.cols(); ++k) {
      const double d = (x.col(i) - c.col(k)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(k);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
    sq_dist(i) = best;
  }
}

void project_psd_blocks(std::vector<MatrixXd>& blocks) {
  for (auto& b : blocks) {
    b = linalg::project_psd(b);
  }
}

}  // namespace serial

// ---------------------------------------------------------------- OpenMP

namespace omp {

MatrixXd quadratic_gram(const MatrixXd& x, const MatrixXd& p) {
  check_square(p, x.rows(), "quadratic_gram: precision must be p x p");
  const Index n = x.cols();
  const MatrixXd px = p * x;
  MatrixXd g(n, n);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      g(i, j) = x.col(i).dot(px.col(j));
    }
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      g(i, j) = g(j, i);
    }
  }
  return g;
}

MatrixXd similarity(const MatrixXd& x, const MatrixXd& precision, double logdet) {
  MatrixXd g = quadratic_gram(x, precision);
  const VectorXd v = g.diagonal();
  const Index n = g.rows();
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      g(i, j) += -logdet - 0.5 * (v(i) + v(j));
    }
  }
  return g;
}

MatrixXd scatter(const MatrixXd& x, const MatrixXd& z) {
  check_square(z, x.cols(), "scatter: Z must be n x n");
  // sum_ij Z_ij x_i x_i^T / 2 + sum_ij Z_ij x_j x_j^T / 2 = X diag((r + c)/2) X^T.
  const VectorXd mass = 0.5 * (z.rowwise().sum() + z.colwise().sum().transpose());
  const Index n = x.cols();
  const Index dim = x.rows();
  MatrixXd xz(dim, n);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) {
    xz.col(j) = x * z.col(j);
  }
  const MatrixXd s = x * mass.asDiagonal() * x.transpose() - xz * x.transpose();
  return linalg::symmetrize(s);
}

MatrixXd pairwise_sq_dists(const MatrixXd& x) {
  const Index n = x.cols();
  MatrixXd d(n, n);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Index i = 0; i < j; ++i) {
      d(i, j) = (x.col(i) - x.col(j)).squaredNorm();
    }
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      d(i, j) = d(j, i);
    }
  }
  return d;
}

void assign_nearest(const MatrixXd& x, const MatrixXd& c, std::vector<int>& labels,
                    VectorXd& sq_dist) {
  const Index n = x.cols();
  labels.assign(static_cast<std::size_t>(n), 0);
  sq_dist.resize(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Index k = 0; k < c.cols(); ++k) {
      const double d = (x.col(i) - c.col(k)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(k);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
    sq_dist(i) = best;
  }
}

void project_psd_blocks(std::vector<MatrixXd>& blocks) {
  const auto count = static_cast<Index>(blocks.size());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < count; ++k) {
    blocks[static_cast<std::size_t>(k)] = linalg::project_psd(blocks[static_cast<std::size_t>(k)]);
  }
}

}  // namespace omp

}  // namespace lasdp::kernels
