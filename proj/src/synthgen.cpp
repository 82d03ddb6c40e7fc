#include "reflines/synthgen.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "reflines/error.hpp"
#include "reflines/text.hpp"

namespace reflines {
namespace {

const std::vector<std::string> kWords = {
    "analysis",    "approach",   "model",       "data",        "results",     "method",
    "system",      "information", "structure",  "process",     "framework",   "evaluation",
    "performance", "network",    "learning",    "features",    "extraction",  "document",
    "language",    "semantic",   "retrieval",   "knowledge",   "statistical", "automatic",
    "citation",    "corpus",     "sequence",    "probability", "inference",   "training",
    "large",       "scale",      "efficient",   "robust",      "novel",       "general",
    "empirical",   "study",      "towards",     "using",       "based",       "improved",
    "detection",   "recognition", "classification", "segmentation", "parsing", "digital",
    "library",     "scientific", "publications", "metadata",   "layout",      "text",
    "mining",      "towards",    "distributed", "social",      "sciences",    "historical",
    "archives",    "journal",    "workshop",    "conditional", "random",      "fields",
    "graphical",   "models",     "neural",      "representation", "comparison", "survey"};

const std::vector<std::string> kFiller = {
    "the", "of", "and", "in", "for", "with", "on", "we", "this", "is", "are", "to",
    "a", "that", "by", "as", "our", "which", "from", "these"};

const std::vector<std::string> kSurnames = {
    "Smith",    "Johnson",  "Lafferty", "McCallum", "Pereira",  "Kowalski", "Lopez",
    "Councill", "Giles",    "Kan",      "Wu",       "Peng",     "Cortez",   "Groza",
    "Koller",   "Friedman", "Ghavimi",  "Mayr",     "Hosseini", "Boukhers", "Staab",
    "Lee",      "Chen",     "Wang",     "Zhang",    "Kumar",    "Garcia",   "Martin",
    "Rossi",    "Novak",    "Jensen",   "Nakamura", "Okafor",   "Silva",    "Dubois",
    "Fischer",  "Weber",    "Becker",   "Hoffmann", "Schulz",   "Klein",    "Wolf",
    "Neumann",  "Schwarz",  "Zimmermann", "Braun",  "Hofmann",  "Hartmann", "Lange",
    "Müller",   "Schäfer",  "Körner",   "Petrov",   "Ivanova",  "Kowalski", "Nowak",
    "Andersson", "Larsen",  "Virtanen", "OBrien",   "Murphy",   "Kelly"};

const std::vector<std::string> kVenueHeads = {
    "Journal of", "Proceedings of the Conference on", "International Journal on",
    "Transactions on", "Annals of", "Workshop on"};

const std::vector<std::string> kSectionNames = {
    "Introduction", "Related Work", "Background", "Method", "Approach", "Experiments",
    "Results", "Discussion", "Evaluation", "Conclusion"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  int uniform(int lo, int hi) {
    return lo + static_cast<int>(g_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double real() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return real() < p; }
  const std::string& pick(const std::vector<std::string>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }
  std::uint64_t next() { return g_(); }

 private:
  std::mt19937_64 g_;
};

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  for (auto tok : text::split_whitespace(s)) out.emplace_back(tok);
  return out;
}

bool hyphenatable(const std::string& w) {
  if (w.size() < 7) return false;
  for (char c : w) {
    if (c < 'a' || c > 'z') return false;
  }
  return true;
}

// Greedy line wrap; long lowercase words may be split with a hyphen.
std::vector<std::string> wrap(const std::vector<std::string>& words, int width,
                              double hyphen_p, Rng& rng) {
  std::vector<std::string> lines;
  std::string cur;
  const auto w = static_cast<std::size_t>(width);
  for (std::string word : words) {
    const std::size_t need = cur.empty() ? word.size() : cur.size() + 1 + word.size();
    if (need <= w || cur.empty()) {
      cur = cur.empty() ? word : cur + " " + word;
      continue;
    }
    if (hyphenatable(word) && rng.chance(hyphen_p)) {
      const auto room = static_cast<int>(w) - static_cast<int>(cur.size()) - 2;
      const int cut = std::min(room, static_cast<int>(word.size()) - 3);
      if (cut >= 3) {
        lines.push_back(cur + " " + word.substr(0, static_cast<std::size_t>(cut)) + "-");
        cur = word.substr(static_cast<std::size_t>(cut));
        continue;
      }
    }
    lines.push_back(cur);
    cur = word;
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::string author_initial(Rng& rng) {
  return std::string(1, static_cast<char>('A' + rng.uniform(0, 25))) + ".";
}

std::string make_reference(Rng& rng, bool numbered, int title_words,
                           const std::string& marker) {
  const int n_authors = rng.uniform(1, 4);
  const int year = rng.uniform(1950, 2023);
  std::string title;
  for (int i = 0; i < title_words; ++i) {
    const std::string& w = (i > 0 && rng.chance(0.25)) ? rng.pick(kFiller) : rng.pick(kWords);
    title += i == 0 ? capitalize(w) : " " + w;
  }
  std::string venue = rng.pick(kVenueHeads) + " " + capitalize(rng.pick(kWords)) + " " +
                      capitalize(rng.pick(kWords));
  const int volume = rng.uniform(1, 60);
  const int issue = rng.uniform(1, 12);
  const int first_page = rng.uniform(1, 900);
  const int last_page = first_page + rng.uniform(2, 40);
  const std::string dash = rng.chance(0.5) ? "-" : "\xE2\x80\x93";
  const std::string pages = std::to_string(first_page) + dash + std::to_string(last_page);

  std::string authors;
  for (int i = 0; i < n_authors; ++i) {
    const std::string& sn = rng.pick(kSurnames);
    std::string a = numbered ? author_initial(rng) + " " + sn : sn + ", " + author_initial(rng);
    if (i > 0) authors += (i + 1 == n_authors && rng.chance(0.5)) ? ", and " : ", ";
    authors += a;
  }
  if (n_authors > 3 && rng.chance(0.3)) authors += ", et al.";

  std::string out = marker.empty() ? "" : marker + " ";
  if (numbered) {
    out += authors + ": " + title + ". " + venue + " " + std::to_string(volume) + "(" +
           std::to_string(issue) + "), " + pages + " (" + std::to_string(year) + ").";
  } else {
    out += authors + " (" + std::to_string(year) + ") " + title + ". " + venue + " " +
           std::to_string(volume) + "(" + std::to_string(issue) + "): " + pages + ".";
  }
  return out;
}

std::vector<std::string> sentence(Rng& rng, bool numbered_citations) {
  std::vector<std::string> words;
  const int n = rng.uniform(6, 18);
  for (int i = 0; i < n; ++i) {
    std::string w = rng.chance(0.4) ? rng.pick(kFiller) : rng.pick(kWords);
    if (i == 0) w = capitalize(w);
    words.push_back(w);
    if (i > 2 && i + 2 < n && rng.chance(0.06)) {
      if (numbered_citations) {
        words.push_back("[" + std::to_string(rng.uniform(1, 30)) + "]");
      } else {
        words.push_back("(" + rng.pick(kSurnames));
        words.push_back(std::to_string(rng.uniform(1950, 2023)) + ")");
      }
    }
    if (i > 1 && i + 1 < n && rng.chance(0.05)) words.back() += ",";
  }
  words.back() += ".";
  return words;
}

constexpr double kLeft = 72.0;

// Per-document typesetting choices; they keep layout cues from being
// sufficient on their own.
struct DocStyle {
  bool layout = true;          // false: text-only document, no layout fields
  bool hanging_indent = true;  // continuation lines indented
  bool small_ref_font = true;  // end-section references set smaller than body text
  bool ref_spacing = true;     // extra space before each reference

  static DocStyle draw(Rng& rng) {
    DocStyle s;
    s.layout = rng.chance(0.8);
    s.hanging_indent = rng.chance(0.6);
    s.small_ref_font = rng.chance(0.5);
    s.ref_spacing = rng.chance(0.5);
    return s;
  }
};

class PageWriter {
 public:
  PageWriter(LabeledDocument& doc, Rng& rng, int page_height, int page_base,
             std::string running_header, bool layout)
      : doc_(doc),
        rng_(rng),
        page_height_(page_height),
        page_base_(page_base),
        header_(std::move(running_header)),
        layout_(layout) {}

  void emit(const std::string& text, Label label, double x, double font, bool bold,
            double gap) {
    if (lines_on_page_ >= page_height_) break_page(label == Label::IRef);
    if (after_break_) {
      gap = 20.0;
      after_break_ = false;
    }
    push(text, label, x, font, bold, gap);
    ++lines_on_page_;
  }

  // Page number at the bottom of the page, optionally a running header on
  // top of the next one. Inside a reference these lines are O-REF.
  void break_page(bool inside_reference) {
    const Label l = inside_reference ? Label::ORef : Label::O;
    push(std::to_string(page_base_ + page_), l, 300.0, 10.0, false, 28.0);
    ++page_;
    lines_on_page_ = 0;
    if (rng_.chance(0.5)) push(header_, l, kLeft, 9.0, false, 0.0);
    after_break_ = true;
  }

  int lines_on_page() const { return lines_on_page_; }

 private:
  void push(const std::string& text, Label label, double x, double font, bool bold,
            double gap) {
    LineRecord rec;
    rec.text = text;
    rec.page = page_;
    doc_.labels.push_back(label);
    if (!layout_) {
      doc_.document.lines.push_back(std::move(rec));
      return;
    }
    if (!doc_.document.lines.empty()) {
      rec.v_gap =
          std::max(0.0, std::round((gap + (rng_.real() - 0.5) * 0.6) * 100.0) / 100.0);
      rec.indent = x - prev_x_;
    } else {
      rec.v_gap = 0.0;
      rec.indent = 0.0;
    }
    rec.font_size = font;
    rec.bold = bold;
    prev_x_ = x;
    doc_.document.lines.push_back(std::move(rec));
  }

  LabeledDocument& doc_;
  Rng& rng_;
  int page_height_;
  int page_base_;
  std::string header_;
  bool layout_;
  int page_ = 0;
  int lines_on_page_ = 0;
  bool after_break_ = false;
  double prev_x_ = kLeft;
};

// Wrapped reference lines; retries with shorter titles to stay within 1..4
// lines.
std::vector<std::string> reference_lines(Rng& rng, bool numbered, const std::string& marker,
                                         int width, double hyphen_p) {
  int title_words = rng.uniform(3, 12);
  for (;;) {
    const auto text = make_reference(rng, numbered, title_words, marker);
    auto lines = wrap(split_words(text), width, hyphen_p, rng);
    if (lines.size() <= 4 || title_words <= 2) {
      if (lines.size() > 4) lines.resize(4);
      return lines;
    }
    title_words -= 3;
  }
}

void body_paragraph(PageWriter& w, Rng& rng, int n_lines, int width, double hyphen_p,
                    bool numbered_citations) {
  std::vector<std::string> words;
  std::vector<std::string> lines;
  while (static_cast<int>(lines.size()) < n_lines) {
    const auto s = sentence(rng, numbered_citations);
    words.insert(words.end(), s.begin(), s.end());
    lines = wrap(words, width, hyphen_p, rng);
  }
  // Cut at a sentence end close to the requested length.
  lines.resize(static_cast<std::size_t>(n_lines));
  if (lines.back().back() == '-') lines.back().pop_back();
  if (lines.back().back() != '.') lines.back() += ".";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double x = i == 0 ? kLeft + 12.0 : kLeft;
    w.emit(lines[i], Label::O, x, 10.0, false, i == 0 ? 18.0 : 12.0);
  }
}

std::string running_header(Rng& rng) {
  return rng.chance(0.5) ? rng.pick(kSurnames) + " et al."
                         : capitalize(rng.pick(kWords)) + " " + capitalize(rng.pick(kWords)) +
                               " " + capitalize(rng.pick(kWords));
}

void title_block(PageWriter& w, Rng& rng) {
  std::string title = "On " + capitalize(rng.pick(kWords)) + " " +
                      capitalize(rng.pick(kWords)) + " for " + capitalize(rng.pick(kWords));
  w.emit(title, Label::O, kLeft, 14.0, true, 0.0);
  std::string authors;
  const int n = rng.uniform(1, 3);
  for (int i = 0; i < n; ++i) {
    if (i) authors += ", ";
    authors += author_initial(rng) + " " + rng.pick(kSurnames);
  }
  w.emit(authors, Label::O, kLeft, 11.0, false, 16.0);
}

LabeledDocument end_section_document(const GenConfig& cfg, Rng& rng, int index,
                                     bool numbered) {
  LabeledDocument doc;
  doc.document.doc_id = "synth-" + std::to_string(index);
  const int width = rng.uniform(55, 80);
  const DocStyle style = DocStyle::draw(rng);
  PageWriter w(doc, rng, cfg.page_height, rng.uniform(1, 2000), running_header(rng),
               style.layout);
  title_block(w, rng);

  const int pages = rng.uniform(cfg.body_pages.min, cfg.body_pages.max);
  int section = 1;
  for (int p = 0; p < pages; ++p) {
    int budget = rng.uniform(cfg.body_lines_per_page.min, cfg.body_lines_per_page.max);
    while (budget > 0) {
      if (rng.chance(0.35)) {
        w.emit(std::to_string(section) + " " +
                   kSectionNames[static_cast<std::size_t>((section - 1) % kSectionNames.size())],
               Label::O, kLeft, 12.0, true, 24.0);
        ++section;
        --budget;
      }
      const int n = std::min(budget, rng.uniform(2, 8));
      if (n > 0) body_paragraph(w, rng, n, width, cfg.hyphenation_probability, numbered);
      budget -= std::max(n, 1);
    }
  }

  const std::vector<std::string> headings = {"References", "References", "References",
                                             "Bibliography", "Literature"};
  w.emit(rng.pick(headings), Label::O, kLeft, 12.0, true, 24.0);
  const int n_refs =
      rng.uniform(cfg.references_per_document.min, cfg.references_per_document.max);
  for (int r = 0; r < n_refs; ++r) {
    const std::string marker = numbered ? "[" + std::to_string(r + 1) + "]" : "";
    const auto lines =
        reference_lines(rng, numbered, marker, width, cfg.hyphenation_probability);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const bool first = i == 0;
      const double x = first || !style.hanging_indent ? kLeft : kLeft + 10.0;
      const double font = style.small_ref_font ? 9.0 : 10.0;
      const double gap = first && style.ref_spacing ? 15.0 : 12.0;
      w.emit(lines[i], first ? Label::BRef : Label::IRef, x, font, false, gap);
    }
  }
  return doc;
}

LabeledDocument footnote_document(const GenConfig& cfg, Rng& rng, int index, bool numbered) {
  LabeledDocument doc;
  doc.document.doc_id = "synth-" + std::to_string(index);
  const int width = rng.uniform(55, 80);
  const DocStyle style = DocStyle::draw(rng);
  // Footnote pages are flushed explicitly; never split a page by height.
  PageWriter w(doc, rng, 1 << 30, rng.uniform(1, 2000), running_header(rng),
               style.layout);
  title_block(w, rng);

  int remaining =
      rng.uniform(cfg.references_per_document.min, cfg.references_per_document.max);
  int footnote = 1;
  int section = 1;
  while (remaining > 0) {
    int budget = rng.uniform(cfg.body_lines_per_page.min, cfg.body_lines_per_page.max);
    while (budget > 0) {
      if (rng.chance(0.25)) {
        w.emit(std::to_string(section) + " " +
                   kSectionNames[static_cast<std::size_t>((section - 1) % kSectionNames.size())],
               Label::O, kLeft, 12.0, true, 24.0);
        ++section;
        --budget;
      }
      const int n = std::min(budget, rng.uniform(2, 8));
      if (n > 0) body_paragraph(w, rng, n, width, cfg.hyphenation_probability, false);
      budget -= std::max(n, 1);
    }
    const int on_page = std::min(remaining, rng.uniform(0, 3));
    int placed = 0;
    bool first_note = true;
    while (placed < on_page) {
      const double font = 8.0;
      const double block_gap = first_note ? 22.0 : (style.ref_spacing ? 11.0 : 9.5);
      const double x_cont = style.hanging_indent ? kLeft + 6.0 : kLeft;
      first_note = false;
      if (rng.chance(0.25)) {
        // Explanatory footnote that is not a reference.
        auto words = sentence(rng, false);
        words.insert(words.begin(), std::to_string(footnote++));
        const auto lines = wrap(words, width, cfg.hyphenation_probability, rng);
        for (std::size_t i = 0; i < lines.size() && i < 3; ++i) {
          w.emit(lines[i], Label::O, i == 0 ? kLeft : x_cont, font, false,
                 i == 0 ? block_gap : 9.5);
        }
        continue;
      }
      const auto lines = reference_lines(rng, numbered, std::to_string(footnote++), width,
                                         cfg.hyphenation_probability);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        const bool first = i == 0;
        w.emit(lines[i], first ? Label::BRef : Label::IRef, first ? kLeft : x_cont, font,
               false, first ? block_gap : 9.5);
      }
      ++placed;
    }
    remaining -= on_page;
    w.break_page(false);
  }
  return doc;
}

}  // namespace

void GenConfig::check() const {
  auto check_range = [](const IntRange& r, const char* what, int floor) {
    if (r.min < floor || r.max < r.min) {
      throw Error(ErrorKind::Config, std::string("invalid range for ") + what);
    }
  };
  if (n_documents < 0) throw Error(ErrorKind::Config, "n_documents must be >= 0");
  check_range(body_lines_per_page, "body_lines_per_page", 1);
  check_range(body_pages, "body_pages", 1);
  check_range(references_per_document, "references_per_document", 0);
  if (page_height < 2) throw Error(ErrorKind::Config, "page_height must be >= 2");
  if (!(hyphenation_probability >= 0 && hyphenation_probability <= 1)) {
    throw Error(ErrorKind::Config, "hyphenation_probability must be in [0, 1]");
  }
}

std::vector<LabeledDocument> generate(const GenConfig& cfg) {
  cfg.check();
  Rng master(cfg.seed);
  std::vector<LabeledDocument> out;
  out.reserve(static_cast<std::size_t>(cfg.n_documents));
  for (int i = 0; i < cfg.n_documents; ++i) {
    // Each document draws from its own stream so documents are stable under
    // changes of n_documents.
    Rng rng(master.next());
    bool numbered = cfg.style == RefStyle::Numbered;
    if (cfg.style == RefStyle::Mixed) numbered = rng.chance(0.5);
    out.push_back(cfg.mode == GenMode::EndSection ? end_section_document(cfg, rng, i, numbered)
                                                  : footnote_document(cfg, rng, i, numbered));
  }
  return out;
}

}  // namespace reflines
