#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "reflines/error.hpp"
#include "reflines/extraction.hpp"
#include "reflines/synthgen.hpp"
#include "reflines/training.hpp"
#include "support.hpp"

using namespace reflines;
using namespace reflines::testing;

namespace {

TrainingInstance as_instance(const RandomInstance& r, std::string id = "r") {
  return {std::move(id), r.lines, r.gold};
}

std::vector<LabeledDocument> small_synthetic(std::uint64_t seed, int n) {
  GenConfig g;
  g.seed = seed;
  g.n_documents = n;
  g.references_per_document = {3, 6};
  g.body_lines_per_page = {6, 10};
  g.body_pages = {1, 1};
  return generate(g);
}

double norm(const std::vector<double>& w) {
  double s = 0;
  for (double x : w) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("zero-weight gradient of a one-line document") {
  const auto space = FeatureSpace::from_attributes({"f"}, 1);
  const std::vector<double> w(space.size(), 0.0);
  const std::vector<TrainingInstance> corpus = {{"d", {{{0}}}, {Label::IRef}}};
  const auto og = objective_and_gradient(w, space, corpus, 10.0);
  CHECK(og.objective == doctest::Approx(std::log(0.25)));
  for (Label y : kAllLabels) {
    const double expected = y == Label::IRef ? 0.75 : -0.25;
    CHECK(og.gradient[space.emission_index(0, y)] == doctest::Approx(expected).epsilon(1e-12));
  }
  for (std::size_t i = 4; i < space.size(); ++i) CHECK(og.gradient[i] == 0.0);
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(31337);
  const double h = 1e-4;
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const auto inst = random_instance(rng, 1 + i % 2, 1, 5, 1.0);
    const std::vector<TrainingInstance> corpus = {as_instance(inst)};
    const double sigma = 1.5;
    const auto og = objective_and_gradient_serial(inst.model.weights, inst.model.space, corpus,
                                                  sigma);
    std::vector<double> w = inst.model.weights;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double w0 = w[k];
      w[k] = w0 + h;
      const double fp =
          objective_and_gradient_serial(w, inst.model.space, corpus, sigma).objective;
      w[k] = w0 - h;
      const double fm =
          objective_and_gradient_serial(w, inst.model.space, corpus, sigma).objective;
      w[k] = w0;
      const double fd = (fp - fm) / (2 * h);
      const double rel = std::abs(fd - og.gradient[k]) /
                         std::max({std::abs(fd), std::abs(og.gradient[k]), 1.0});
      worst = std::max(worst, rel);
    }
  }
  MESSAGE("worst relative gradient error " << worst);
  CHECK(worst < 1e-5);
}

TEST_CASE("parallel gradient is bitwise equal to the serial reference") {
  const auto docs = small_synthetic(8, 12);
  const FeatureConfig fc;
  const auto space = build_feature_space(docs, fc, 2);
  const auto instances = make_instances(docs, fc, space);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> w(space.size());
  for (double& x : w) x = u(rng);
  const auto serial = objective_and_gradient_serial(w, space, instances, 3.0);
  for (int jobs : {0, 1, 2, 5}) {
    const auto par = objective_and_gradient(w, space, instances, 3.0, jobs);
    CHECK(par.objective == serial.objective);
    CHECK(par.gradient == serial.gradient);
  }
  CHECK(make_instances(docs, fc, space, 1)[3].lines == make_instances(docs, fc, space, 4)[3].lines);
}

TEST_CASE("non-finite objective names the document") {
  const auto space = FeatureSpace::from_attributes({"f"}, 1);
  std::vector<double> w(space.size(), 0.0);
  w[space.emission_index(0, Label::O)] = std::numeric_limits<double>::infinity();
  const std::vector<TrainingInstance> corpus = {{"ok", {{{}}}, {Label::O}},
                                                {"bad-doc", {{{0}}}, {Label::BRef}}};
  try {
    objective_and_gradient(w, space, corpus, 10.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Training);
    CHECK(std::string(e.what()).find("bad-doc") != std::string::npos);
  }
}

TEST_CASE("training improves on the uniform model and is deterministic") {
  const auto docs = small_synthetic(21, 20);
  std::size_t n_lines = 0;
  for (const auto& d : docs) n_lines += d.labels.size();
  const TrainConfig tc;
  const auto a = train(docs, {}, 1, tc);
  CHECK(a.report.initial_objective ==
        doctest::Approx(static_cast<double>(n_lines) * std::log(0.25)));
  CHECK(a.report.final_objective > a.report.initial_objective);
  CHECK(static_cast<int>(a.report.objective_trace.size()) == a.report.iterations);
  CHECK(a.report.grad_norm_trace.size() == a.report.objective_trace.size());
  double prev = a.report.initial_objective;
  for (double v : a.report.objective_trace) {
    CHECK(v >= prev);
    prev = v;
  }

  TrainConfig serial = tc;
  serial.jobs = 1;
  const auto b = train(docs, {}, 1, serial);
  CHECK(a.model.weights == b.model.weights);
  CHECK(a.model.space == b.model.space);
}

TEST_CASE("strong regularization shrinks the weights") {
  const auto docs = small_synthetic(22, 6);
  TrainConfig loose;
  TrainConfig tight;
  tight.l2_sigma = 0.01;
  const auto a = train(docs, {}, 1, loose);
  const auto b = train(docs, {}, 1, tight);
  CHECK(norm(b.model.weights) < norm(a.model.weights));
}

TEST_CASE("a separable toy corpus is fit exactly") {
  // Each label has its own marker token; only the first character feature
  // templates see it.
  const std::vector<std::pair<std::string, Label>> proto = {
      {"Body text here", Label::O},
      {"[1] Smith, J. (2001) A title.", Label::BRef},
      {"continued line of reference", Label::IRef},
      {"17", Label::ORef},
      {"more continuation text", Label::IRef},
      {"[2] Doe, J. (1999) Another.", Label::BRef},
  };
  std::vector<LabeledDocument> docs;
  for (int k = 0; k < 4; ++k) {
    LabeledDocument d;
    d.document.doc_id = "toy" + std::to_string(k);
    for (int r = 0; r <= k; ++r) {
      for (const auto& [text, label] : proto) {
        d.document.lines.push_back(line(text));
        d.labels.push_back(label);
      }
    }
    docs.push_back(d);
  }
  const auto res = train(docs, {}, 2, {});
  for (const auto& d : docs) {
    CHECK(label_document(d.document, res.model, Constraints::none()) == d.labels);
  }
}

TEST_CASE("a feature that never fires does not change decoding") {
  const auto docs = small_synthetic(23, 6);
  const FeatureConfig fc;
  const auto space = build_feature_space(docs, fc, 2);
  auto attrs = space.attributes();
  attrs.push_back("zz_never");
  const auto wider = FeatureSpace::from_attributes(attrs, 2);
  const TrainConfig tc;
  const auto a = fit(space, fc, make_instances(docs, fc, space), tc);
  const auto b = fit(wider, fc, make_instances(docs, fc, wider), tc);
  CHECK(b.model.weights[wider.emission_index(*wider.attribute_index("zz_never"), Label::O)] ==
        0.0);
  for (const auto& d : docs) {
    CHECK(label_document(d.document, a.model, Constraints::bio_only()) ==
          label_document(d.document, b.model, Constraints::bio_only()));
  }
}

TEST_CASE("SGD reaches the same optimum regardless of seed") {
  const auto docs = small_synthetic(3, 10);
  TrainConfig tc;
  tc.l2_sigma = 1.0;
  const auto exact = train(docs, {}, 1, tc);
  std::vector<double> finals;
  for (std::uint64_t seed : {1, 2}) {
    TrainConfig s = tc;
    s.optimizer = Optimizer::Sgd;
    s.seed = seed;
    s.sgd_learning_rate = 2.0;
    s.max_iterations = 1500;
    s.convergence_tol = 1e-9;
    finals.push_back(train(docs, {}, 1, s).report.final_objective);
  }
  const double ref = std::abs(exact.report.final_objective);
  CHECK(std::abs(finals[0] - finals[1]) / ref < 1e-4);
  CHECK(std::abs(finals[0] - exact.report.final_objective) / ref < 1e-4);
}

TEST_CASE("SGD runs are reproducible for a fixed seed") {
  const auto docs = small_synthetic(4, 4);
  TrainConfig s;
  s.optimizer = Optimizer::Sgd;
  s.seed = 9;
  s.max_iterations = 5;
  CHECK(train(docs, {}, 1, s).model.weights == train(docs, {}, 1, s).model.weights);
}

TEST_CASE("k-fold evaluation") {
  const auto one = small_synthetic(30, 1).at(0);
  SUBCASE("identical documents give identical folds") {
    const std::vector<LabeledDocument> docs(4, one);
    const auto folds = kfold_evaluate(docs, 2, {}, 1, {}, Constraints::bio_only());
    REQUIRE(folds.size() == 2);
    CHECK(folds[0].metrics == folds[1].metrics);
    CHECK(folds[0].test_documents.size() == 2);
  }
  SUBCASE("leave-one-out") {
    const auto docs = small_synthetic(31, 3);
    const auto folds = kfold_evaluate(docs, 3, {}, 1, {}, Constraints::bio_only());
    REQUIRE(folds.size() == 3);
    std::vector<std::size_t> seen;
    for (const auto& f : folds) {
      REQUIRE(f.test_documents.size() == 1);
      seen.push_back(f.test_documents[0]);
      CHECK(f.metrics.lines == docs[f.test_documents[0]].labels.size());
    }
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<std::size_t>{0, 1, 2});
  }
  SUBCASE("bad k") {
    const std::vector<LabeledDocument> docs(3, one);
    CHECK_THROWS_AS(kfold_evaluate(docs, 1, {}, 1, {}, {}), Error);
    CHECK_THROWS_AS(kfold_evaluate(docs, 4, {}, 1, {}, {}), Error);
  }
  SUBCASE("splits follow the seed") {
    CHECK(seeded_permutation(10, 1) == seeded_permutation(10, 1));
    CHECK(seeded_permutation(10, 1) != seeded_permutation(10, 2));
  }
}

TEST_CASE("configuration and corpus errors") {
  CHECK_THROWS_AS(train({}, {}, 1, {}), Error);
  TrainConfig bad;
  bad.l2_sigma = 0;
  CHECK_THROWS_AS(bad.check(), Error);
  bad = {};
  bad.convergence_tol = 1.0;
  CHECK_THROWS_AS(bad.check(), Error);
  bad = {};
  bad.max_iterations = 0;
  CHECK_THROWS_AS(bad.check(), Error);
}

TEST_CASE("report serializes") {
  TrainReport r;
  r.iterations = 2;
  r.objective_trace = {-3, -2};
  r.grad_norm_trace = {1, 0.5};
  const auto j = to_json(r);
  CHECK(j.at("iterations") == 2);
  CHECK(j.at("objective_trace").size() == 2);
  CHECK(j.contains("wall_time_seconds"));
}
