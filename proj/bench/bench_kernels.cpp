// Serial vs OpenMP timings for the two document-parallel kernels: the training
// objective/gradient and corpus labeling.
//
//   reflines_bench [n_documents] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "reflines/extraction.hpp"
#include "reflines/feature_space.hpp"
#include "reflines/synthgen.hpp"
#include "reflines/training.hpp"

using namespace reflines;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

void report(const char* kernel, double serial, double parallel) {
  std::printf("%-22s serial %9.4f s   parallel %9.4f s   speedup %5.2fx\n", kernel, serial,
              parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int n_docs = argc > 1 ? std::atoi(argv[1]) : 200;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

  GenConfig gen;
  gen.seed = 7;
  gen.n_documents = n_docs;
  const auto corpus = generate(gen);
  const FeatureConfig fc;
  const int order = 2;

  const FeatureSpace space = build_feature_space(corpus, fc, order);
  const auto instances = make_instances(corpus, fc, space);
  std::size_t lines = 0;
  for (const auto& d : corpus) lines += d.labels.size();
  std::printf("%d documents, %zu lines, %zu weights, order %d, %d threads\n", n_docs, lines,
              space.size(), order, omp_get_max_threads());

  // Small nonzero weights so forward-backward is not degenerate.
  std::vector<double> w(space.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.01 * static_cast<double>(i % 7) - 0.03;

  const double g_serial = best_of(repeats, [&] {
    volatile double sink = objective_and_gradient_serial(w, space, instances, 10.0).objective;
    (void)sink;
  });
  const double g_parallel = best_of(repeats, [&] {
    volatile double sink = objective_and_gradient(w, space, instances, 10.0).objective;
    (void)sink;
  });
  report("objective+gradient", g_serial, g_parallel);

  CrfModel model{space, w, fc, true};
  std::vector<Document> docs;
  for (const auto& d : corpus) docs.push_back(d.document);
  const auto constraints = model.default_constraints();
  const double l_serial = best_of(repeats, [&] {
    volatile std::size_t sink = label_corpus_serial(docs, model, constraints).size();
    (void)sink;
  });
  const double l_parallel = best_of(repeats, [&] {
    volatile std::size_t sink = label_corpus(docs, model, constraints).size();
    (void)sink;
  });
  report("label_corpus", l_serial, l_parallel);
  return 0;
}
