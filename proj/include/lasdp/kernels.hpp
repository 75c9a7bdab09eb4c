#pragma once

// Data-parallel inner loops. Every kernel exists twice:
//
//   kernels::serial  - straightforward loops, the reference the tests trust
//   kernels::omp     - OpenMP version used by the library
//
// The two must agree to rounding error; tests/test_kernels.cpp checks that and
// bench/bench_kernels.cpp times them against each other. OpenMP loops use
// static schedules and write disjoint outputs, so results do not depend on
// the thread count.

#include <Eigen/Dense>

#include <vector>

namespace lasdp::kernels {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace serial {

/// X^T P X for X p x n and symmetric P p x p.
MatrixXd quadratic_gram(const MatrixXd& x, const MatrixXd& p);

/// -logdet 11^T - 1/2 (v 1^T + 1 v^T) + X^T P X with v = diag(X^T P X).
MatrixXd similarity(const MatrixXd& x, const MatrixXd& precision, double logdet);

/// sum_ij Z_ij [ (x_i x_i^T + x_j x_j^T)/2 - x_i x_j^T ], symmetrized.
MatrixXd scatter(const MatrixXd& x, const MatrixXd& z);

/// ||x_i - x_j||^2 for all sample pairs.
MatrixXd pairwise_sq_dists(const MatrixXd& x);

/// Nearest center (columns of c) for each sample; ties go to the lower index.
void assign_nearest(const MatrixXd& x, const MatrixXd& c, std::vector<int>& labels,
                    VectorXd& sq_dist);

/// In-place PSD projection of each block.
void project_psd_blocks(std::vector<MatrixXd>& blocks);

}  // namespace serial

namespace omp {

MatrixXd quadratic_gram(const MatrixXd& x, const MatrixXd& p);
MatrixXd similarity(const MatrixXd& x, const MatrixXd& precision, double logdet);
MatrixXd scatter(const MatrixXd& x, const MatrixXd& z);
MatrixXd pairwise_sq_dists(const MatrixXd& x);
void assign_nearest(const MatrixXd& x, const MatrixXd& c, std::vector<int>& labels,
                    VectorXd& sq_dist);
void project_psd_blocks(std::vector<MatrixXd>& blocks);

}  // namespace omp

using omp::assign_nearest;
using omp::pairwise_sq_dists;
using omp::project_psd_blocks;
using omp::quadratic_gram;
using omp::scatter;
using omp::similarity;

}  // namespace lasdp::kernels
