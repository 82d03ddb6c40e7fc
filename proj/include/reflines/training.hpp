#pragma once

// L2-regularised conditional log-likelihood training.
//
//   L(w) = sum_docs log p(gold | x) - |w|^2 / (2 sigma^2)
//   dL/dw_k = empirical count of k - expected count of k - w_k / sigma^2
//
// Expected counts come from forward-backward marginals over the
// unconstrained lattice, so noisy gold sequences stay finite-scoring.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reflines/corpus.hpp"
#include "reflines/crf.hpp"
#include "reflines/evaluation.hpp"
#include "reflines/feature_space.hpp"
#include "reflines/features.hpp"

namespace reflines {

enum class Optimizer { QuasiNewton, Sgd };

struct TrainConfig {
  double l2_sigma = 10.0;
  int max_iterations = 200;  // quasi-Newton iterations or SGD epochs
  double convergence_tol = 1e-6;
  Optimizer optimizer = Optimizer::QuasiNewton;
  std::uint64_t seed = 0;
  double sgd_learning_rate = 0.1;  // eta_k = eta_0 / (1 + k / n_docs)
  int jobs = 0;                    // OpenMP threads; 0 = runtime default

  void check() const;
};

struct TrainReport {
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  double initial_objective = 0;
  double final_objective = 0;
  std::vector<double> objective_trace;  // one entry per iteration
  std::vector<double> grad_norm_trace;
  double wall_time_seconds = 0;
};

nlohmann::json to_json(const TrainReport& r);

/// A gold-labeled document after vectorisation.
struct TrainingInstance {
  std::string doc_id;
  std::vector<FeatureVector> lines;
  std::vector<Label> labels;
};

std::vector<TrainingInstance> make_instances(const std::vector<LabeledDocument>& docs,
                                             const FeatureConfig& config,
                                             const FeatureSpace& space, int jobs = 0);

/// One document's log-likelihood and its sparse gradient contribution
/// (indices may repeat; entries are summed).
struct DocumentTerm {
  double log_prob = 0;
  std::vector<std::pair<std::uint32_t, double>> gradient;
};

DocumentTerm document_term(const FeatureSpace& space, std::span<const double> weights,
                           const TrainingInstance& doc);

struct ObjectiveGradient {
  double objective = 0;
  std::vector<double> gradient;
};

/// Per-document terms run in parallel; the reduction is always in document
/// order, so the result is bit-identical to the serial version.
ObjectiveGradient objective_and_gradient(std::span<const double> weights,
                                         const FeatureSpace& space,
                                         std::span<const TrainingInstance> corpus,
                                         double l2_sigma, int jobs = 0);
ObjectiveGradient objective_and_gradient_serial(std::span<const double> weights,
                                                const FeatureSpace& space,
                                                std::span<const TrainingInstance> corpus,
                                                double l2_sigma);

struct TrainResult {
  CrfModel model;
  TrainReport report;
};

/// Optimises weights over a fixed feature space, starting from zero.
TrainResult fit(const FeatureSpace& space, const FeatureConfig& config,
                std::span<const TrainingInstance> corpus, const TrainConfig& train_config);

TrainResult train(const std::vector<LabeledDocument>& corpus, const FeatureConfig& config,
                  int order, const TrainConfig& train_config);

struct FoldResult {
  std::size_t fold = 0;
  std::vector<std::size_t> test_documents;  // corpus indices
  Metrics metrics;
  TrainReport report;
};

/// Document-level k-fold cross-validation. Folds come from a seeded shuffle
/// of document indices: position p goes to fold p mod k.
std::vector<FoldResult> kfold_evaluate(const std::vector<LabeledDocument>& corpus,
                                       std::size_t k, const FeatureConfig& config, int order,
                                       const TrainConfig& train_config,
                                       const Constraints& decode_constraints);

/// Deterministic permutation of 0..n-1 from `seed` (Fisher-Yates over
/// std::mt19937_64).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace reflines
