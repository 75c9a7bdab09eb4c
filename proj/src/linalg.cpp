#include "lasdp/linalg.hpp"

#include "lasdp/error.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace lasdp::linalg {

namespace {

// dsyevr driver. range 'A' (all), 'V' (values in (vl, vu]) or 'I' (indices il..iu, 1-based).
SymEigen run_dsyevr(const MatrixXd& a, char range, double vl, double vu, lapack_int il,
                    lapack_int iu) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("sym_eigen: matrix is not square");
  }
  SymEigen out;
  if (n == 0) {
    return out;
  }
  if (!a.allFinite()) {
    throw NumericFailure("sym_eigen: non-finite input");
  }
  MatrixXd work = a;
  VectorXd w(n);
  const lapack_int max_vectors = range == 'I' ? iu - il + 1 : n;
  MatrixXd z(n, max_vectors);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', range, 'L', n, work.data(), n, vl, vu, il, iu, 0.0,
                     &found, w.data(), z.data(), n, isuppz.data());
  if (info == 0) {
    out.values = w.head(found);
    out.vectors = z.leftCols(found);
    return out;
  }
  // dsyevr occasionally reports an internal failure (info > 0) on clustered
  // spectra; the divide-and-conquer driver is slower but robust.
  work = a;
  const lapack_int info_d =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, work.data(), n, w.data());
  if (info_d != 0) {
    throw NumericFailure("sym_eigen: dsyevr/dsyevd failed with info=" + std::to_string(info) +
                         "/" + std::to_string(info_d));
  }
  Index first = 0;
  Index last = n;
  if (range == 'V') {
    while (first < n && w(first) <= vl) {
      ++first;
    }
    while (last > first && w(last - 1) > vu) {
      --last;
    }
  } else if (range == 'I') {
    first = il - 1;
    last = iu;
  }
  out.values = w.segment(first, last - first);
  out.vectors = work.middleCols(first, last - first);
  return out;
}

}  // namespace

SymEigen sym_eigen(const MatrixXd& a) { return run_dsyevr(a, 'A', 0.0, 0.0, 0, 0); }

VectorXd sym_eigenvalues(const MatrixXd& a) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("sym_eigenvalues: matrix is not square");
  }
  if (n == 0) {
    return {};
  }
  if (!a.allFinite()) {
    throw NumericFailure("sym_eigenvalues: non-finite input");
  }
  MatrixXd work = a;
  VectorXd w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
  if (info != 0) {
    throw NumericFailure("sym_eigenvalues: dsyevd failed with info=" + std::to_string(info));
  }
  return w;
}

SymEigen sym_eigen_top(const MatrixXd& a, Index count) {
  const Index n = a.rows();
  count = std::clamp<Index>(count, 0, n);
  if (count == 0) {
    return {VectorXd(0), MatrixXd(n, 0)};
  }
  return run_dsyevr(a, 'I', 0.0, 0.0, static_cast<lapack_int>(n - count + 1),
                    static_cast<lapack_int>(n));
}

MatrixXd project_psd(const MatrixXd& a) {
  const Index n = a.rows();
  // Only the positive part of the spectrum is needed; the upper bound is
  // any number above the spectral radius.
  const double upper = a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  const SymEigen pos = run_dsyevr(a, 'V', 0.0, upper, 0, 0);
  if (pos.values.size() == 0) {
    return MatrixXd::Zero(n, n);
  }
  MatrixXd scaled = pos.vectors * pos.values.cwiseSqrt().asDiagonal();
  return scaled * scaled.transpose();
}

double psd_floor_level(const MatrixXd& s) {
  const double p = static_cast<double>(s.rows());
  return 1e-6 * (std::max(s.trace(), 0.0) / p + 1e-12);
}

MatrixXd apply_psd_floor(const MatrixXd& s) {
  const MatrixXd sym = symmetrize(s);
  const double eps = psd_floor_level(sym);
  SymEigen eig = sym_eigen(sym);
  if (eig.values.minCoeff() >= eps) {
    return sym;
  }
  eig.values = eig.values.cwiseMax(eps);
  return symmetrize(eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose());
}

SpdFactor::SpdFactor(const MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw DimensionMismatch("covariance must be square and nonempty");
  }
  if (!sigma.allFinite()) {
    throw CovarianceSingular("covariance has non-finite entries");
  }
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * (1.0 + sigma.cwiseAbs().maxCoeff())) {
    throw CovarianceSingular("covariance is not symmetric");
  }
  eig_ = sym_eigen(symmetrize(sigma));
  const double lo = eig_.values.minCoeff();
  const double hi = eig_.values.maxCoeff();
  if (!(lo > 0.0) || lo <= 1e-14 * hi) {
    throw CovarianceSingular("covariance is singular or indefinite (min eigenvalue " +
                             std::to_string(lo) + ")");
  }
  const MatrixXd& v = eig_.vectors;
  inverse_ = v * eig_.values.cwiseInverse().asDiagonal() * v.transpose();
  inv_sqrt_ = v * eig_.values.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  sqrt_ = v * eig_.values.cwiseSqrt().asDiagonal() * v.transpose();
  logdet_ = eig_.values.array().log().sum();
}

}  // namespace lasdp::linalg
