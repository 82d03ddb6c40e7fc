#include "reflines/crf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reflines/error.hpp"

namespace reflines {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lse4(const std::array<double, kNumLabels>& v) {
  double m = *std::max_element(v.begin(), v.end());
  if (m == kNegInf) return kNegInf;
  double sum = 0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

double lse(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double sum = 0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

void require_nonempty(std::span<const FeatureVector> lines) {
  if (lines.empty()) throw Error(ErrorKind::Decode, "empty sequence (T == 0)");
}

}  // namespace

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

bool bio_transition_allowed(Label prev, Label next) {
  return !(prev == Label::O && (next == Label::IRef || next == Label::ORef));
}

Lattice::Lattice(const FeatureSpace& space, std::span<const double> weights,
                 std::span<const FeatureVector> lines, const Constraints& constraints)
    : states_(space.states()), length_(static_cast<int>(lines.size())) {
  if (weights.size() != space.size()) {
    throw Error(ErrorKind::Model, "weight vector size does not match feature space");
  }
  if (!constraints.allowed.empty() && constraints.allowed.size() != lines.size()) {
    throw Error(ErrorKind::Decode, "allowed-label mask length differs from line count");
  }
  emission_.assign(lines.size() * kNumLabels, 0.0);
  for (std::size_t t = 0; t < lines.size(); ++t) {
    double* row = &emission_[t * kNumLabels];
    for (std::uint32_t a : lines[t].active) {
      const double* w = &weights[space.emission_index(a, Label::BRef)];
      for (int y = 0; y < kNumLabels; ++y) row[y] += w[y];
    }
    if (!constraints.allowed.empty()) {
      for (int y = 0; y < kNumLabels; ++y) {
        if (!(constraints.allowed[t] & (1u << y))) row[y] = kNegInf;
      }
    }
  }

  const int n_states = states_.size();
  transition_.resize(static_cast<std::size_t>(n_states * kNumLabels));
  start_.assign(static_cast<std::size_t>(n_states), kNegInf);
  for (int s = 0; s < n_states; ++s) {
    for (Label y : kAllLabels) {
      double w = weights[space.transition_index(s, y)];
      if (constraints.bio && !bio_transition_allowed(StateSpace::last(s), y)) w = kNegInf;
      transition_[static_cast<std::size_t>(s * kNumLabels + index_of(y))] = w;
    }
  }
  for (Label y : kAllLabels) {
    const bool ok = !constraints.bio || bio_transition_allowed(Label::O, y);
    start_[static_cast<std::size_t>(states_.start_state(y))] = ok ? 0.0 : kNegInf;
  }
}

double Lattice::score(std::span<const Label> labels) const {
  if (static_cast<int>(labels.size()) != length_) {
    throw Error(ErrorKind::Decode, "label sequence length differs from line count");
  }
  int s = states_.start_state(labels[0]);
  double total = start(s) + emission(0, labels[0]);
  for (int t = 1; t < length_; ++t) {
    const Label y = labels[static_cast<std::size_t>(t)];
    total += transition(s, y) + emission(t, y);
    s = states_.successor(s, y);
  }
  return total;
}

ForwardBackward forward_backward(const Lattice& lat) {
  const int T = lat.length();
  const StateSpace& st = lat.states();
  const int S = st.size();
  ForwardBackward fb;
  fb.length = T;
  fb.num_states = S;
  fb.alpha.assign(static_cast<std::size_t>(T * S), kNegInf);
  fb.beta.assign(static_cast<std::size_t>(T * S), kNegInf);
  auto A = [&](int t, int s) -> double& { return fb.alpha[static_cast<std::size_t>(t * S + s)]; };
  auto B = [&](int t, int s) -> double& { return fb.beta[static_cast<std::size_t>(t * S + s)]; };

  for (Label y : kAllLabels) {
    const int s = st.start_state(y);
    A(0, s) = lat.start(s) + lat.emission(0, y);
  }
  std::array<double, kNumLabels> terms{};
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const Label y = StateSpace::last(s);
      for (Label x : kAllLabels) {
        const int p = st.predecessor(s, x);
        terms[static_cast<std::size_t>(index_of(x))] = A(t - 1, p) + lat.transition(p, y);
      }
      A(t, s) = lat.emission(t, y) + lse4(terms);
    }
  }

  for (int s = 0; s < S; ++s) B(T - 1, s) = 0.0;
  for (int t = T - 2; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      for (Label y : kAllLabels) {
        terms[static_cast<std::size_t>(index_of(y))] =
            lat.transition(s, y) + lat.emission(t + 1, y) + B(t + 1, st.successor(s, y));
      }
      B(t, s) = lse4(terms);
    }
  }
  fb.log_z = lse(std::span<const double>(&fb.alpha[static_cast<std::size_t>((T - 1) * S)],
                                         static_cast<std::size_t>(S)));
  return fb;
}

std::vector<std::array<double, kNumLabels>> label_marginals(const Lattice&,
                                                            const ForwardBackward& fb) {
  if (fb.log_z == kNegInf) throw Error(ErrorKind::Decode, "infeasible constraints");
  std::vector<std::array<double, kNumLabels>> out(static_cast<std::size_t>(fb.length));
  for (int t = 0; t < fb.length; ++t) {
    auto& row = out[static_cast<std::size_t>(t)];
    row.fill(0.0);
    for (int s = 0; s < fb.num_states; ++s) {
      const double lp = fb.alpha_at(t, s) + fb.beta_at(t, s) - fb.log_z;
      if (lp == kNegInf) continue;
      row[static_cast<std::size_t>(index_of(StateSpace::last(s)))] += std::exp(lp);
    }
  }
  return out;
}

DecodeResult viterbi(const Lattice& lat) {
  const int T = lat.length();
  const StateSpace& st = lat.states();
  const int S = st.size();
  // best[t * S + s]: best score of lines t+1..T-1 given state s at line t.
  std::vector<double> best(static_cast<std::size_t>(T * S), kNegInf);
  auto Bt = [&](int t, int s) -> double& { return best[static_cast<std::size_t>(t * S + s)]; };
  auto step = [&](int t, int s, Label y) {
    return lat.transition(s, y) + lat.emission(t + 1, y) + Bt(t + 1, st.successor(s, y));
  };

  for (int s = 0; s < S; ++s) Bt(T - 1, s) = 0.0;
  for (int t = T - 2; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double m = kNegInf;
      for (Label y : kAllLabels) m = std::max(m, step(t, s, y));
      Bt(t, s) = m;
    }
  }

  // Walk forward taking the smallest label that still attains the optimum;
  // each comparison repeats the exact expression the maximum came from.
  DecodeResult out;
  out.labels.reserve(static_cast<std::size_t>(T));
  double total = kNegInf;
  for (Label y : kAllLabels) {
    const int s = st.start_state(y);
    total = std::max(total, lat.start(s) + lat.emission(0, y) + Bt(0, s));
  }
  if (total == kNegInf) throw Error(ErrorKind::Decode, "infeasible constraints");
  int s = -1;
  for (Label y : kAllLabels) {
    const int cand = st.start_state(y);
    if (lat.start(cand) + lat.emission(0, y) + Bt(0, cand) == total) {
      out.labels.push_back(y);
      s = cand;
      break;
    }
  }
  for (int t = 0; t + 1 < T; ++t) {
    for (Label y : kAllLabels) {
      if (step(t, s, y) == Bt(t, s)) {
        out.labels.push_back(y);
        s = st.successor(s, y);
        break;
      }
    }
  }
  out.score = total;
  return out;
}

double log_partition(const CrfModel& model, std::span<const FeatureVector> lines,
                     const Constraints& constraints) {
  require_nonempty(lines);
  const Lattice lat(model.space, model.weights, lines, constraints);
  return forward_backward(lat).log_z;
}

std::vector<std::array<double, kNumLabels>> marginals(const CrfModel& model,
                                                      std::span<const FeatureVector> lines,
                                                      const Constraints& constraints) {
  require_nonempty(lines);
  const Lattice lat(model.space, model.weights, lines, constraints);
  return label_marginals(lat, forward_backward(lat));
}

DecodeResult viterbi(const CrfModel& model, std::span<const FeatureVector> lines,
                     const Constraints& constraints) {
  require_nonempty(lines);
  const Lattice lat(model.space, model.weights, lines, constraints);
  return viterbi(lat);
}

double sequence_log_prob(const CrfModel& model, std::span<const FeatureVector> lines,
                         std::span<const Label> labels, const Constraints& constraints) {
  if (labels.size() != lines.size()) {
    throw Error(ErrorKind::Decode, "label sequence length differs from line count");
  }
  require_nonempty(lines);
  const Lattice lat(model.space, model.weights, lines, constraints);
  const double s = lat.score(labels);
  if (s == kNegInf) return kNegInf;
  return s - forward_backward(lat).log_z;
}

}  // namespace reflines
