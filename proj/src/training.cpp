#include "reflines/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "parallel.hpp"
#include "reflines/error.hpp"
#include "reflines/lbfgs.hpp"

namespace reflines {
namespace {

ObjectiveGradient reduce(std::span<const double> weights,
                         std::span<const TrainingInstance> corpus,
                         const std::vector<DocumentTerm>& terms, double l2_sigma) {
  const double inv_var = 1.0 / (l2_sigma * l2_sigma);
  ObjectiveGradient out;
  out.gradient.resize(weights.size());
  double penalty = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    penalty += weights[i] * weights[i];
    out.gradient[i] = -weights[i] * inv_var;
  }
  double loglik = 0;
  for (std::size_t d = 0; d < terms.size(); ++d) {
    if (!std::isfinite(terms[d].log_prob)) {
      throw Error(ErrorKind::Training,
                  "non-finite objective in document '" + corpus[d].doc_id + "'");
    }
    loglik += terms[d].log_prob;
    for (const auto& [idx, v] : terms[d].gradient) out.gradient[idx] += v;
  }
  out.objective = loglik - 0.5 * penalty * inv_var;
  return out;
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

CrfModel make_model(const FeatureSpace& space, const FeatureConfig& config,
                    std::vector<double> weights) {
  CrfModel m;
  m.space = space;
  m.weights = std::move(weights);
  m.config = config;
  m.constraints_default = true;
  return m;
}

TrainResult fit_quasi_newton(const FeatureSpace& space, const FeatureConfig& config,
                             std::span<const TrainingInstance> corpus,
                             const TrainConfig& tc) {
  std::vector<double> w(space.size(), 0.0);
  // The optimiser minimises, so the objective is negated here.
  Objective f = [&](std::span<const double> x, std::span<double> g) {
    ObjectiveGradient og;
    try {
      og = objective_and_gradient(x, space, corpus, tc.l2_sigma, tc.jobs);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Training) throw;
      // A trial point overflowed; the line search treats it as a failed step.
      return std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -og.gradient[i];
    return -og.objective;
  };
  LbfgsOptions opt;
  opt.max_iterations = tc.max_iterations;
  opt.tolerance = tc.convergence_tol;
  const auto res = lbfgs_minimize(f, w, opt);
  if (!std::isfinite(res.initial_value)) {
    // Re-evaluate to surface the offending document.
    objective_and_gradient(w, space, corpus, tc.l2_sigma, tc.jobs);
    throw Error(ErrorKind::Training, "non-finite objective at the initial weights");
  }
  if (!std::isfinite(res.value)) {
    throw Error(ErrorKind::Training, "training diverged: objective is not finite");
  }

  TrainResult out;
  out.report.iterations = res.iterations;
  out.report.converged = res.converged;
  out.report.stop_reason = res.stop_reason;
  out.report.initial_objective = -res.initial_value;
  out.report.final_objective = -res.value;
  for (double v : res.value_trace) out.report.objective_trace.push_back(-v);
  out.report.grad_norm_trace = res.grad_norm_trace;
  out.model = make_model(space, config, std::move(w));
  return out;
}

TrainResult fit_sgd(const FeatureSpace& space, const FeatureConfig& config,
                    std::span<const TrainingInstance> corpus, const TrainConfig& tc) {
  std::vector<double> w(space.size(), 0.0);
  const double n = static_cast<double>(corpus.size());
  const double inv_var = 1.0 / (tc.l2_sigma * tc.l2_sigma);
  std::mt19937_64 rng(tc.seed);

  TrainResult out;
  double prev = objective_and_gradient(w, space, corpus, tc.l2_sigma, tc.jobs).objective;
  out.report.initial_objective = prev;
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < tc.max_iterations; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
    for (std::size_t d : order) {
      const double eta = tc.sgd_learning_rate / (1.0 + static_cast<double>(step) / n);
      ++step;
      const DocumentTerm term = document_term(space, w, corpus[d]);
      if (!std::isfinite(term.log_prob)) {
        throw Error(ErrorKind::Training, "training diverged in document '" +
                                             corpus[d].doc_id + "'");
      }
      const double shrink = 1.0 - eta * inv_var / n;
      for (double& x : w) x *= shrink;
      for (const auto& [idx, v] : term.gradient) w[idx] += eta * v;
    }
    const auto og = objective_and_gradient(w, space, corpus, tc.l2_sigma, tc.jobs);
    ++out.report.iterations;
    out.report.objective_trace.push_back(og.objective);
    out.report.grad_norm_trace.push_back(norm(og.gradient));
    const double scale = std::max({std::abs(prev), std::abs(og.objective), 1.0});
    const bool small_change = std::abs(og.objective - prev) / scale < tc.convergence_tol;
    prev = og.objective;
    if (small_change) {
      out.report.converged = true;
      out.report.stop_reason = "relative objective change below tolerance";
      break;
    }
  }
  if (out.report.stop_reason.empty()) out.report.stop_reason = "maximum iterations reached";
  out.report.final_objective = prev;
  out.model = make_model(space, config, std::move(w));
  return out;
}

}  // namespace

void TrainConfig::check() const {
  if (!(l2_sigma > 0)) throw Error(ErrorKind::Config, "l2_sigma must be positive");
  if (max_iterations <= 0) throw Error(ErrorKind::Config, "max_iterations must be positive");
  if (!(convergence_tol > 0 && convergence_tol < 1)) {
    throw Error(ErrorKind::Config, "convergence_tol must be in (0, 1)");
  }
  if (!(sgd_learning_rate > 0)) {
    throw Error(ErrorKind::Config, "sgd_learning_rate must be positive");
  }
  if (jobs < 0) throw Error(ErrorKind::Config, "jobs must be non-negative");
}

nlohmann::json to_json(const TrainReport& r) {
  return {{"iterations", r.iterations},
          {"converged", r.converged},
          {"stop_reason", r.stop_reason},
          {"initial_objective", r.initial_objective},
          {"final_objective", r.final_objective},
          {"objective_trace", r.objective_trace},
          {"grad_norm_trace", r.grad_norm_trace},
          {"wall_time_seconds", r.wall_time_seconds}};
}

std::vector<TrainingInstance> make_instances(const std::vector<LabeledDocument>& docs,
                                             const FeatureConfig& config,
                                             const FeatureSpace& space, int jobs) {
  std::vector<TrainingInstance> out(docs.size());
  detail::parallel_for(docs.size(), jobs, [&](std::size_t i) {
    const auto& d = docs[i];
    if (d.labels.size() != d.document.lines.size()) {
      throw Error(ErrorKind::Corpus, "document '" + d.document.doc_id +
                                         "' has a label count different from its lines");
    }
    out[i].doc_id = d.document.doc_id;
    out[i].lines = vectorize(d.document, config, space);
    out[i].labels = d.labels;
  });
  return out;
}

DocumentTerm document_term(const FeatureSpace& space, std::span<const double> weights,
                           const TrainingInstance& doc) {
  const Lattice lat(space, weights, doc.lines, Constraints::none());
  const ForwardBackward fb = forward_backward(lat);
  const auto& st = lat.states();
  const int T = lat.length();
  const int S = st.size();

  DocumentTerm term;
  term.log_prob = lat.score(doc.labels) - fb.log_z;
  if (!std::isfinite(term.log_prob)) return term;

  const auto marg = label_marginals(lat, fb);
  std::size_t n_emit = 0;
  for (const auto& v : doc.lines) n_emit += v.active.size() * kNumLabels;
  term.gradient.reserve(n_emit + static_cast<std::size_t>(st.num_transitions()));

  for (int t = 0; t < T; ++t) {
    const auto& p = marg[static_cast<std::size_t>(t)];
    const int gold = index_of(doc.labels[static_cast<std::size_t>(t)]);
    for (std::uint32_t a : doc.lines[static_cast<std::size_t>(t)].active) {
      const auto base = static_cast<std::uint32_t>(space.emission_index(a, Label::BRef));
      for (int y = 0; y < kNumLabels; ++y) {
        const double emp = y == gold ? 1.0 : 0.0;
        term.gradient.emplace_back(base + static_cast<std::uint32_t>(y),
                                   emp - p[static_cast<std::size_t>(y)]);
      }
    }
  }

  std::vector<double> trans(static_cast<std::size_t>(st.num_transitions()), 0.0);
  int s = st.start_state(doc.labels[0]);
  for (int t = 1; t < T; ++t) {
    const Label y = doc.labels[static_cast<std::size_t>(t)];
    trans[static_cast<std::size_t>(s * kNumLabels + index_of(y))] += 1.0;
    s = st.successor(s, y);
  }
  for (int t = 1; t < T; ++t) {
    for (int from = 0; from < S; ++from) {
      const double a = fb.alpha_at(t - 1, from);
      if (a == -std::numeric_limits<double>::infinity()) continue;
      for (Label y : kAllLabels) {
        const int to = st.successor(from, y);
        const double lp =
            a + lat.transition(from, y) + lat.emission(t, y) + fb.beta_at(t, to) - fb.log_z;
        trans[static_cast<std::size_t>(from * kNumLabels + index_of(y))] -= std::exp(lp);
      }
    }
  }
  const auto tbase = static_cast<std::uint32_t>(space.transition_index(0, Label::BRef));
  for (std::size_t k = 0; k < trans.size(); ++k) {
    if (trans[k] != 0.0) term.gradient.emplace_back(tbase + static_cast<std::uint32_t>(k), trans[k]);
  }
  return term;
}

ObjectiveGradient objective_and_gradient(std::span<const double> weights,
                                         const FeatureSpace& space,
                                         std::span<const TrainingInstance> corpus,
                                         double l2_sigma, int jobs) {
  if (corpus.empty()) throw Error(ErrorKind::Corpus, "empty corpus");
  std::vector<DocumentTerm> terms(corpus.size());
  detail::parallel_for(corpus.size(), jobs, [&](std::size_t d) {
    terms[d] = document_term(space, weights, corpus[d]);
  });
  return reduce(weights, corpus, terms, l2_sigma);
}

ObjectiveGradient objective_and_gradient_serial(std::span<const double> weights,
                                                const FeatureSpace& space,
                                                std::span<const TrainingInstance> corpus,
                                                double l2_sigma) {
  if (corpus.empty()) throw Error(ErrorKind::Corpus, "empty corpus");
  std::vector<DocumentTerm> terms;
  terms.reserve(corpus.size());
  for (const auto& doc : corpus) terms.push_back(document_term(space, weights, doc));
  return reduce(weights, corpus, terms, l2_sigma);
}

TrainResult fit(const FeatureSpace& space, const FeatureConfig& config,
                std::span<const TrainingInstance> corpus, const TrainConfig& tc) {
  tc.check();
  if (corpus.empty()) throw Error(ErrorKind::Corpus, "empty corpus");
  const auto start = std::chrono::steady_clock::now();
  TrainResult out = tc.optimizer == Optimizer::QuasiNewton
                        ? fit_quasi_newton(space, config, corpus, tc)
                        : fit_sgd(space, config, corpus, tc);
  out.report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

TrainResult train(const std::vector<LabeledDocument>& corpus, const FeatureConfig& config,
                  int order, const TrainConfig& tc) {
  if (corpus.empty()) throw Error(ErrorKind::Corpus, "empty corpus");
  config.check();
  tc.check();
  const FeatureSpace space = build_feature_space(corpus, config, order);
  const auto instances = make_instances(corpus, config, space, tc.jobs);
  return fit(space, config, instances, tc);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng() % i]);
  return p;
}

std::vector<FoldResult> kfold_evaluate(const std::vector<LabeledDocument>& corpus,
                                       std::size_t k, const FeatureConfig& config, int order,
                                       const TrainConfig& tc,
                                       const Constraints& decode_constraints) {
  if (k < 2) throw Error(ErrorKind::Usage, "k-fold needs k >= 2");
  if (corpus.size() < k) {
    throw Error(ErrorKind::Corpus, "corpus of " + std::to_string(corpus.size()) +
                                       " documents is smaller than k = " + std::to_string(k));
  }
  const auto perm = seeded_permutation(corpus.size(), tc.seed);
  std::vector<FoldResult> out;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<LabeledDocument> train_docs, test_docs;
    FoldResult fr;
    fr.fold = f;
    for (std::size_t p = 0; p < perm.size(); ++p) {
      if (p % k == f) {
        test_docs.push_back(corpus[perm[p]]);
        fr.test_documents.push_back(perm[p]);
      } else {
        train_docs.push_back(corpus[perm[p]]);
      }
    }
    auto result = train(train_docs, config, order, tc);
    fr.metrics = evaluate_corpus(result.model, test_docs, decode_constraints, tc.jobs);
    fr.report = std::move(result.report);
    out.push_back(std::move(fr));
  }
  return out;
}

}  // namespace reflines
