#pragma once

// Relaxed membership matrices to hard partitions.

#include "lasdp/core.hpp"

#include <cstdint>
#include <string_view>

namespace lasdp {

enum class Rounding { kSpectral, kBlockmass };

std::string_view to_string(Rounding r);
Rounding rounding_from_string(std::string_view name);

/// K-means (best of n_restarts) on the rows of the top-k eigenvectors of z_sum.
Partition spectral_round(const MatrixXd& z_sum, int k, std::uint64_t seed, int n_restarts = 10);

/// i goes to argmax_k (Z_k 1)_i, ties to the smallest k.
Partition blockmass_round(const LiftedMembership& z);

Partition round_membership(const LiftedMembership& z, Rounding how, std::uint64_t seed,
                           int n_restarts = 10);

}  // namespace lasdp
