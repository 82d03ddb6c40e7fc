#pragma once

// Linear-chain CRF inference over expanded label states, in the log domain.
//
// For line t with attribute set x_t the emission score of label y is
//   psi_t(y) = sum_{a in x_t} w[a~y]
// and the transition score between consecutive expanded states is
//   tau(s, s') = w[T:s>s'].
// A label sequence scores S(y) = sum_t psi_t(y_t) + sum_{t>=2} tau(s_{t-1}, s_t)
// and p(y | x) = exp(S(y)) / Z(x).

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "reflines/feature_space.hpp"
#include "reflines/features.hpp"
#include "reflines/label.hpp"

namespace reflines {

/// Decode-time restrictions on the label sequence.
struct Constraints {
  /// BIO well-formedness: no I-REF or O-REF on the first line or directly
  /// after O. I-REF after O-REF and O-REF runs stay legal.
  bool bio = false;
  /// Optional per-line bitmask of allowed labels (bit index_of(y)). Empty
  /// means every label is allowed.
  std::vector<std::uint8_t> allowed;

  static Constraints none() { return {}; }
  static Constraints bio_only() { return {true, {}}; }
};

/// True when `next` may follow `prev` under BIO constraints.
bool bio_transition_allowed(Label prev, Label next);

struct CrfModel {
  FeatureSpace space;
  std::vector<double> weights;  // indexed like `space`
  FeatureConfig config;
  bool constraints_default = true;

  int order() const { return space.order(); }
  Constraints default_constraints() const {
    return constraints_default ? Constraints::bio_only() : Constraints::none();
  }
};

/// Dense score tables for one document: emissions (T x 4), transitions
/// (S x 4) and start scores (S), with constraints folded in as -inf.
class Lattice {
 public:
  Lattice(const FeatureSpace& space, std::span<const double> weights,
          std::span<const FeatureVector> lines, const Constraints& constraints);

  int length() const { return length_; }
  const StateSpace& states() const { return states_; }

  double emission(int t, Label y) const {
    return emission_[static_cast<std::size_t>(t * kNumLabels + index_of(y))];
  }
  double transition(int s, Label next) const {
    return transition_[static_cast<std::size_t>(s * kNumLabels + index_of(next))];
  }
  double start(int s) const { return start_[static_cast<std::size_t>(s)]; }

  /// S(y) with the constraint masks applied; -inf for barred sequences.
  double score(std::span<const Label> labels) const;

 private:
  StateSpace states_;
  int length_;
  std::vector<double> emission_;
  std::vector<double> transition_;
  std::vector<double> start_;
};

/// Forward and backward log messages, indexed [t * S + s].
struct ForwardBackward {
  int length = 0;
  int num_states = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  double log_z = 0;

  double alpha_at(int t, int s) const {
    return alpha[static_cast<std::size_t>(t * num_states + s)];
  }
  double beta_at(int t, int s) const {
    return beta[static_cast<std::size_t>(t * num_states + s)];
  }
};

ForwardBackward forward_backward(const Lattice& lattice);

/// Per-line label posteriors from forward-backward messages.
std::vector<std::array<double, kNumLabels>> label_marginals(const Lattice& lattice,
                                                            const ForwardBackward& fb);

struct DecodeResult {
  std::vector<Label> labels;
  double score = 0;
};

/// Highest-scoring sequence; ties go to the lexicographically smallest
/// sequence under B-REF < I-REF < O-REF < O.
DecodeResult viterbi(const Lattice& lattice);

double log_partition(const CrfModel& model, std::span<const FeatureVector> lines,
                     const Constraints& constraints = {});
std::vector<std::array<double, kNumLabels>> marginals(
    const CrfModel& model, std::span<const FeatureVector> lines,
    const Constraints& constraints = {});
DecodeResult viterbi(const CrfModel& model, std::span<const FeatureVector> lines,
                     const Constraints& constraints = {});
double sequence_log_prob(const CrfModel& model, std::span<const FeatureVector> lines,
                         std::span<const Label> labels,
                         const Constraints& constraints = {});

double log_sum_exp(double a, double b);

}  // namespace reflines
