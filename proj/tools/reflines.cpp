// reflines: train, apply and inspect line-level reference extraction models.
//
// Exit codes: 0 success, 3 training stopped without converging (model still
// written), 10 usage, 11 config, 12 corpus, 13 model, 14 I/O, 15 training,
// 16 decoding.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reflines/cli_config.hpp"
#include "reflines/corpus.hpp"
#include "reflines/error.hpp"
#include "reflines/evaluation.hpp"
#include "reflines/extraction.hpp"
#include "reflines/feature_space.hpp"
#include "reflines/model_io.hpp"
#include "reflines/synthgen.hpp"
#include "reflines/training.hpp"

namespace {

using namespace reflines;

constexpr int kExitNotConverged = 3;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Usage: return 10;
    case ErrorKind::Config: return 11;
    case ErrorKind::Corpus: return 12;
    case ErrorKind::Model: return 13;
    case ErrorKind::Io: return 14;
    case ErrorKind::Training: return 15;
    case ErrorKind::Decode: return 16;
  }
  return 10;
}

// Options shared by every subcommand that builds or applies a model.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::string seed, order, constraints, jobs, format;
  std::string l2_sigma, max_iterations, optimizer;

  void add_to(CLI::App* app, bool training) {
    app->add_option("--config", config_path, "JSON config file");
    app->add_option("--set", sets, "Override a config key: key=value")->take_all();
    app->add_option("--constraints", constraints, "BIO decode constraints: on|off");
    app->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
    app->add_option("--format", format, "Corpus format: jsonl|tsv (default: by extension)");
    if (training) {
      app->add_option("--seed", seed, "Seed for stochastic components");
      app->add_option("--order", order, "Markov order (1-3)");
      app->add_option("--l2-sigma", l2_sigma, "Gaussian prior width (default 10)");
      app->add_option("--max-iterations", max_iterations, "Optimizer iterations or epochs");
      app->add_option("--optimizer", optimizer, "quasi-newton|sgd");
    }
  }

  CliConfig resolve() const {
    CliConfig c;
    if (!config_path.empty()) c = load_cli_config(config_path);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::Usage, "--set expects key=value, got '" + kv + "'");
      }
      apply_override(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!seed.empty()) apply_override(c, "seed", seed);
    if (!order.empty()) apply_override(c, "order", order);
    if (!constraints.empty()) apply_override(c, "constraints", "\"" + constraints + "\"");
    if (!jobs.empty()) apply_override(c, "jobs", jobs);
    if (!l2_sigma.empty()) apply_override(c, "l2_sigma", l2_sigma);
    if (!max_iterations.empty()) apply_override(c, "max_iterations", max_iterations);
    if (!optimizer.empty()) apply_override(c, "optimizer", optimizer);
    return c;
  }
};

bool file_is_blank(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  char c;
  while (in.get(c)) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::vector<CorpusDocument> read_inputs(const std::vector<std::string>& paths,
                                        const std::string& format) {
  std::vector<CorpusDocument> docs;
  for (const auto& p : paths) {
    if (file_is_blank(p)) continue;
    auto part = read_corpus_file(p, format);
    docs.insert(docs.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  if (docs.empty()) throw Error(ErrorKind::Corpus, "empty corpus");
  return docs;
}

// Writes to `path`, or stdout when path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void warn_invalid(const std::vector<LabeledDocument>& docs) {
  for (const auto& d : docs) {
    for (const auto& w : validate(d)) {
      std::cerr << "warning: document '" << d.document.doc_id << "': " << w << '\n';
    }
  }
}

int cmd_train(const std::vector<std::string>& inputs, const std::string& model_out,
              const CommonOptions& common) {
  const CliConfig cfg = common.resolve();
  const auto docs = require_labeled(read_inputs(inputs, common.format));
  warn_invalid(docs);
  const auto result = train(docs, cfg.features, cfg.order, cfg.train);

  ModelMetadata meta;
  meta.corpus_hash = corpus_hash(docs);
  meta.iterations = result.report.iterations;
  meta.objective = result.report.final_objective;
  save(result.model, model_out, meta);
  {
    Output report(model_out + ".report.json");
    report.stream() << to_json(result.report).dump(2) << '\n';
  }
  std::cerr << "trained " << result.model.space.size() << " weights on " << docs.size()
            << " documents: " << result.report.iterations << " iterations, objective "
            << result.report.final_objective << " (" << result.report.stop_reason << ")\n";
  return result.report.converged ? 0 : kExitNotConverged;
}

Constraints constraints_for(const CliConfig& cfg) {
  return cfg.constraints ? Constraints::bio_only() : Constraints::none();
}

int cmd_extract(const std::string& model_path, const std::string& input,
                const std::string& out_path, const CommonOptions& common) {
  CliConfig cfg = common.resolve();
  const auto mf = load(model_path);
  if (common.constraints.empty()) cfg.constraints = mf.model.constraints_default;
  const auto parsed = read_inputs({input}, common.format);
  std::vector<Document> docs;
  docs.reserve(parsed.size());
  for (const auto& d : parsed) docs.push_back(d.document);
  const auto refs = extract_corpus(docs, mf.model, constraints_for(cfg), cfg.jobs);
  Output out(out_path);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out.stream() << extraction_to_json(docs[i].doc_id, refs[i]).dump() << '\n';
  }
  return 0;
}

std::string tsv_safe(std::string s) {
  for (char& c : s) {
    if (c == '\t') c = ' ';
  }
  return s;
}

int cmd_label(const std::string& model_path, const std::string& input,
              const std::string& out_path, const CommonOptions& common) {
  CliConfig cfg = common.resolve();
  const auto mf = load(model_path);
  if (common.constraints.empty()) cfg.constraints = mf.model.constraints_default;
  const auto parsed = read_inputs({input}, common.format);
  std::vector<Document> docs;
  for (const auto& d : parsed) docs.push_back(d.document);
  const auto labels = label_corpus(docs, mf.model, constraints_for(cfg), cfg.jobs);
  Output out(out_path);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (d > 0) out.stream() << '\n';
    for (std::size_t i = 0; i < docs[d].lines.size(); ++i) {
      out.stream() << tsv_safe(docs[d].lines[i].text);
      if (parsed[d].labels) out.stream() << '\t' << to_string((*parsed[d].labels)[i]);
      out.stream() << '\t' << to_string(labels[d][i]) << '\n';
    }
  }
  return 0;
}

nlohmann::json summary_row(const Metrics& m) {
  const Prf r = m.reference();
  return {{"accuracy", m.accuracy()},
          {"ref.precision", r.precision},
          {"ref.recall", r.recall},
          {"ref.f1", r.f1}};
}

int cmd_eval(const std::string& model_path, const std::string& input, int kfold,
             bool gold_self, std::string metrics_out, const CommonOptions& common) {
  CliConfig cfg = common.resolve();
  const auto docs = require_labeled(read_inputs({input}, common.format));
  if (metrics_out.empty()) metrics_out = input + ".metrics.json";
  nlohmann::json out_json;

  if (kfold > 0) {
    const auto folds =
        kfold_evaluate(docs, static_cast<std::size_t>(kfold), cfg.features, cfg.order,
                       cfg.train, constraints_for(cfg));
    std::printf("%-6s %9s %9s %9s %9s\n", "fold", "accuracy", "ref.P", "ref.R", "ref.F1");
    nlohmann::json rows = nlohmann::json::array();
    Metrics pooled;
    double mean[4] = {0, 0, 0, 0};
    for (const auto& f : folds) {
      const Prf r = f.metrics.reference();
      const double vals[4] = {f.metrics.accuracy(), r.precision, r.recall, r.f1};
      std::printf("%-6zu %9.4f %9.4f %9.4f %9.4f\n", f.fold, vals[0], vals[1], vals[2],
                  vals[3]);
      for (int i = 0; i < 4; ++i) mean[i] += vals[i] / static_cast<double>(folds.size());
      rows.push_back(to_json(f.metrics));
      pooled += f.metrics;
    }
    std::printf("%-6s %9.4f %9.4f %9.4f %9.4f\n", "mean", mean[0], mean[1], mean[2], mean[3]);
    out_json = {{"folds", rows},
                {"mean",
                 {{"accuracy", mean[0]},
                  {"ref.precision", mean[1]},
                  {"ref.recall", mean[2]},
                  {"ref.f1", mean[3]}}},
                {"pooled", to_json(pooled)}};
  } else {
    Metrics m;
    if (gold_self) {
      for (const auto& d : docs) m += document_metrics(d, d.labels);
    } else {
      if (model_path.empty()) throw Error(ErrorKind::Usage, "eval needs --model");
      const auto mf = load(model_path);
      if (common.constraints.empty()) cfg.constraints = mf.model.constraints_default;
      m = evaluate_corpus(mf.model, docs, constraints_for(cfg), cfg.jobs);
    }
    std::cout << format_table(m);
    out_json = to_json(m);
  }
  Output out(metrics_out);
  out.stream() << out_json.dump(2) << '\n';
  return 0;
}

int cmd_features(const std::string& input, const std::string& line_spec,
                 const CommonOptions& common) {
  const CliConfig cfg = common.resolve();
  const auto docs = read_inputs({input}, common.format);
  const auto colon = line_spec.rfind(':');
  if (colon == std::string::npos) {
    throw Error(ErrorKind::Usage, "--line expects doc:index, got '" + line_spec + "'");
  }
  const std::string doc_key = line_spec.substr(0, colon);
  std::size_t idx = 0;
  try {
    idx = std::stoul(line_spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorKind::Usage, "bad line index in '" + line_spec + "'");
  }
  const Document* doc = nullptr;
  for (const auto& d : docs) {
    if (d.document.doc_id == doc_key) {
      doc = &d.document;
      break;
    }
  }
  if (!doc) {
    // Fall back to a zero-based ordinal.
    try {
      const auto ord = std::stoul(doc_key);
      if (ord < docs.size()) doc = &docs[ord].document;
    } catch (const std::exception&) {
    }
  }
  if (!doc) throw Error(ErrorKind::Usage, "no document '" + doc_key + "'");
  for (const auto& name : extract_line_features(*doc, idx, cfg.features)) {
    std::cout << name << '\n';
  }
  return 0;
}

IntRange parse_range(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      const int v = std::stoi(s);
      return {v, v};
    }
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorKind::Usage, "bad range '" + s + "' (expected min:max)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-based reference string extraction with linear-chain CRFs"};
  app.require_subcommand(1);

  CommonOptions common;

  std::vector<std::string> train_inputs;
  std::string model_path, output;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a labeled corpus");
  train_cmd->add_option("corpus", train_inputs, "Labeled corpus files (.jsonl or .tsv)")
      ->required();
  train_cmd->add_option("-o,--model-out", model_path, "Model file to write")->required();
  common.add_to(train_cmd, true);

  std::string input;
  auto* extract_cmd = app.add_subcommand("extract", "Extract reference strings");
  extract_cmd->add_option("-m,--model", model_path, "Model file")->required();
  extract_cmd->add_option("documents", input, "Documents (.jsonl or .tsv)")->required();
  extract_cmd->add_option("-o,--out", output, "Output JSONL (default: stdout)");
  common.add_to(extract_cmd, false);

  auto* label_cmd = app.add_subcommand("label", "Print per-line predicted labels as TSV");
  label_cmd->add_option("-m,--model", model_path, "Model file")->required();
  label_cmd->add_option("corpus", input, "Documents (.jsonl or .tsv)")->required();
  label_cmd->add_option("-o,--out", output, "Output TSV (default: stdout)");
  common.add_to(label_cmd, false);

  int kfold = 0;
  bool gold_self = false;
  std::string metrics_out;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate against gold labels");
  eval_cmd->add_option("-m,--model", model_path, "Model file");
  eval_cmd->add_option("corpus", input, "Labeled corpus")->required();
  eval_cmd->add_option("--kfold", kfold, "Cross-validate with k folds instead of a model");
  eval_cmd->add_flag("--gold-self", gold_self, "Score gold labels against themselves");
  eval_cmd->add_option("--metrics-out", metrics_out,
                       "Metrics JSON path (default: <corpus>.metrics.json)");
  common.add_to(eval_cmd, true);

  std::string line_spec;
  auto* features_cmd = app.add_subcommand("features", "Dump fired feature names of a line");
  features_cmd->add_option("corpus", input, "Corpus file")->required();
  features_cmd->add_option("--line", line_spec, "doc_id:line_index")->required();
  common.add_to(features_cmd, false);

  GenConfig gen;
  std::string gen_mode = "end_section", gen_style = "mixed", gen_refs, gen_body;
  bool unlabeled = false;
  auto* synth_cmd = app.add_subcommand("synthgen", "Generate a synthetic labeled corpus");
  synth_cmd->add_option("-o,--out", output, "Output JSONL (default: stdout)");
  synth_cmd->add_option("--seed", gen.seed, "Generator seed");
  synth_cmd->add_option("-n,--documents", gen.n_documents, "Number of documents");
  synth_cmd->add_option("--mode", gen_mode, "end_section|footnotes");
  synth_cmd->add_option("--style", gen_style, "numbered|author-year|mixed");
  synth_cmd->add_option("--references", gen_refs, "References per document, min:max");
  synth_cmd->add_option("--body-lines", gen_body, "Body lines per page, min:max");
  synth_cmd->add_option("--page-height", gen.page_height, "Lines per page");
  synth_cmd->add_option("--hyphenation", gen.hyphenation_probability,
                        "Line-break hyphenation probability");
  synth_cmd->add_flag("--unlabeled", unlabeled, "Omit labels from the output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 10;
  }

  try {
    if (*train_cmd) return cmd_train(train_inputs, model_path, common);
    if (*extract_cmd) return cmd_extract(model_path, input, output, common);
    if (*label_cmd) return cmd_label(model_path, input, output, common);
    if (*eval_cmd) return cmd_eval(model_path, input, kfold, gold_self, metrics_out, common);
    if (*features_cmd) return cmd_features(input, line_spec, common);
    if (*synth_cmd) {
      if (gen_mode == "end_section") {
        gen.mode = GenMode::EndSection;
      } else if (gen_mode == "footnotes") {
        gen.mode = GenMode::Footnotes;
      } else {
        throw Error(ErrorKind::Usage, "unknown mode '" + gen_mode + "'");
      }
      if (gen_style == "numbered") {
        gen.style = RefStyle::Numbered;
      } else if (gen_style == "author-year") {
        gen.style = RefStyle::AuthorYear;
      } else if (gen_style == "mixed") {
        gen.style = RefStyle::Mixed;
      } else {
        throw Error(ErrorKind::Usage, "unknown style '" + gen_style + "'");
      }
      if (!gen_refs.empty()) gen.references_per_document = parse_range(gen_refs);
      if (!gen_body.empty()) gen.body_lines_per_page = parse_range(gen_body);
      auto docs = generate(gen);
      Output out(output);
      if (unlabeled) {
        std::vector<CorpusDocument> plain;
        for (auto& d : docs) plain.push_back(CorpusDocument{std::move(d.document), {}});
        write_jsonl(out.stream(), plain);
      } else {
        write_jsonl(out.stream(), docs);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 10;
  }
  return 10;
}
