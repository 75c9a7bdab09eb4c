#pragma once

// One entry point per clustering method so the CLI and the benchmark runner
// share the same initialization, perturbation and dimension-reduction steps.

#include "lasdp/baselines.hpp"
#include "lasdp/core.hpp"
#include "lasdp/pipeline.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace lasdp {

enum class Method { kIlasdp, kLasdpOracle, kSdp, kKmeans, kEm, kMem, kHc, kSpectral, kSketchLift };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

enum class InitMethod { kHc, kKmeanspp, kLabelsFile, kRandom };

std::string_view to_string(InitMethod m);
InitMethod init_from_string(std::string_view name);

struct MethodOptions {
  int k = 2;
  std::uint64_t seed = 0;

  /// Initial partition for ilasdp and em.
  InitMethod init = InitMethod::kHc;
  /// Cluster count of the initializer; surplus clusters merged by nearest centroids.
  std::optional<int> init_k;
  /// 0-based labels for InitMethod::kLabelsFile.
  std::vector<int> init_labels;
  double perturb_alpha = 0.0;
  Linkage linkage = Linkage::kWard;

  /// F-test attribute screening before clustering.
  bool screen = false;
  /// Defaults to 2K (capped at p).
  std::optional<int> p0;
  double screen_alpha = 0.7;
  double screen_c = 1e10;
  /// Fisher-LDA reduction; K~ searched over [lda_k_min, lda_k_max],
  /// defaulting to [K, current dimension].
  bool lda = false;
  std::optional<int> lda_k_min;
  std::optional<int> lda_k_max;

  /// Subsample probability for sketchlift.
  double subsample_gamma = 0.3;

  IlasdpConfig ilasdp;
  /// Known covariances for lasdp-oracle (in the original feature space).
  std::vector<MatrixXd> oracle_covariances;

  /// EM / mEM iteration cap and relative log-likelihood tolerance.
  int max_iters = 500;
  double tol = 1e-8;
};

struct MethodResult {
  Partition partition;
  /// Outer/EM/Lloyd iterations, or relaxed-solver iterations for sdp and oracle runs.
  int iterations = 0;
  double wall_ms = 0.0;
  /// Set for iterative likelihood methods.
  std::optional<IlasdpTrace> trace;
  /// Attributes kept by screening (empty when screening is off).
  std::vector<Index> selected;
  int lda_k_tilde = 0;
};

/// Throws on invalid options; numeric failures propagate as lasdp::Error.
MethodResult run_method(Method method, const Dataset& data, const MethodOptions& opt);

/// The initial partition that run_method would hand to ilasdp / em.
Partition initial_partition(const Dataset& data, const MethodOptions& opt);

/// The K-means SDP with A = -1/2 squared distances, spectral rounding.
MethodResult run_kmeans_sdp(const Dataset& data, const MethodOptions& opt);

}  // namespace lasdp
