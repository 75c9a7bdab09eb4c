#include "lasdp/rounding.hpp"

#include "lasdp/baselines.hpp"
#include "lasdp/error.hpp"
#include "lasdp/linalg.hpp"

#include <string>

namespace lasdp {

std::string_view to_string(Rounding r) { return r == Rounding::kSpectral ? "spectral" : "blockmass"; }

Rounding rounding_from_string(std::string_view name) {
  if (name == "spectral") {
    return Rounding::kSpectral;
  }
  if (name == "blockmass") {
    return Rounding::kBlockmass;
  }
  throw ValidationError("unknown rounding '" + std::string(name) + "' (expected spectral|blockmass)");
}

Partition spectral_round(const MatrixXd& z_sum, int k, std::uint64_t seed, int n_restarts) {
  if (z_sum.rows() != z_sum.cols()) {
    throw DimensionMismatch("spectral_round: matrix must be square");
  }
  const Index n = z_sum.rows();
  if (k < 1 || k > n) {
    throw ValidationError("spectral_round: k must be in [1, n]");
  }
  if (k == 1) {
    return Partition(std::vector<int>(static_cast<std::size_t>(n), 0), 1);
  }
  const linalg::SymEigen top = linalg::sym_eigen_top(linalg::symmetrize(z_sum), k);
  // Rows of the n x k eigenvector matrix become the points.
  const MatrixXd points = top.vectors.transpose();
  return kmeans(points, k, seed, n_restarts).partition;
}

Partition blockmass_round(const LiftedMembership& z) {
  const Index n = z.n();
  MatrixXd mass(n, z.k());
  for (int b = 0; b < z.k(); ++b) {
    mass.col(b) = z.block(b).rowwise().sum();
  }
  return Partition(argmax_rows(mass), z.k());
}

Partition round_membership(const LiftedMembership& z, Rounding how, std::uint64_t seed,
                           int n_restarts) {
  if (how == Rounding::kBlockmass) {
    return blockmass_round(z);
  }
  return spectral_round(z.sum(), z.k(), seed, n_restarts);
}

}  // namespace lasdp
