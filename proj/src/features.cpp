#include "reflines/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>
#include <unordered_set>

#include "reflines/error.hpp"
#include "reflines/text.hpp"

namespace reflines {
namespace {

using nlohmann::json;

const std::regex& bracket_marker_re() {
  static const std::regex re(R"(^\s*[\[\(]?\d{1,3}[\]\)\.])");
  return re;
}

const std::regex& year_token_re() {
  static const std::regex re(R"(^\(?(1[5-9]\d\d|20\d\d)[a-z]?\)?$)");
  return re;
}

// Hyphen, en dash or em dash between two digit runs.
const std::regex& page_range_re() {
  static const std::regex re("\\d+\\s*(-|\xE2\x80\x93|\xE2\x80\x94)\\s*\\d+");
  return re;
}

int bucket_of(double v, const std::vector<double>& bounds) {
  int k = 0;
  for (double b : bounds) {
    if (b <= v) ++k;
  }
  return k;
}

std::string with_offset(const std::string& local, int offset) {
  const auto eq = local.find('=');
  const std::string off = (offset > 0 ? "@+" : "@-") + std::to_string(std::abs(offset));
  if (eq == std::string::npos) return local + off;
  return local.substr(0, eq) + off + local.substr(eq);
}

std::string_view strip_token(std::string_view tok) {
  auto is_edge = [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 0x80 && !std::isalnum(u);
  };
  while (!tok.empty() && is_edge(tok.front())) tok.remove_prefix(1);
  while (!tok.empty() && is_edge(tok.back())) tok.remove_suffix(1);
  return tok;
}

bool has_year(const std::vector<std::string_view>& tokens) {
  for (auto tok : tokens) {
    while (!tok.empty() && (tok.back() == '.' || tok.back() == ',' ||
                            tok.back() == ';' || tok.back() == ':')) {
      tok.remove_suffix(1);
    }
    if (tok.size() < 4 || tok.size() > 7) continue;
    if (std::regex_match(tok.begin(), tok.end(), year_token_re())) return true;
  }
  return false;
}

std::size_t punct_count(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::ispunct(u)) ++n;
  }
  return n;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Document-wide quantities the local templates depend on.
class DocumentContext {
 public:
  DocumentContext(const Document& doc, const FeatureConfig& config)
      : doc_(doc), config_(config) {
    for (const auto& h : config.heading_gazetteer) {
      headings_.insert(text::to_lower(text::trim(h)));
    }
    if (config.name_gazetteer) {
      names_.emplace();
      for (const auto& n : *config.name_gazetteer) {
        names_->insert(text::to_lower(text::trim(n)));
      }
    }
    std::vector<double> gaps;
    for (const auto& l : doc.lines) {
      if (l.v_gap) gaps.push_back(*l.v_gap);
    }
    if (!gaps.empty()) median_gap_ = median(std::move(gaps));
  }

  bool on(const char* t) const { return config_.templates.count(t) != 0; }

  bool is_heading(std::size_t i) const {
    return headings_.count(text::to_lower(text::trim(doc_.lines[i].text))) != 0;
  }

  // Fires `after_heading` for line i given whether any line before i is a
  // heading.
  std::vector<std::string> local(std::size_t i, bool heading_before) const {
    std::vector<std::string> out;
    const LineRecord& line = doc_.lines[i];
    const std::string_view t = text::trim(line.text);
    const std::size_t n_lines = doc_.lines.size();

    auto add = [&](const char* name) {
      if (on(name)) out.emplace_back(name);
    };
    auto add_bucket = [&](const char* name, const std::string& bucket) {
      if (on(name)) out.push_back(std::string(name) + "=" + bucket);
    };

    add("bias");
    if (heading_before) add("after_heading");
    add_bucket("relpos", std::to_string(std::min<std::size_t>(9, 10 * i / n_lines)));

    if (t.empty()) {
      add("is_empty");
    } else {
      const auto tokens = text::split_whitespace(t);
      if (std::isdigit(static_cast<unsigned char>(t.front()))) add("starts_digit");
      if (on("starts_bracket_marker") &&
          std::regex_search(t.begin(), t.end(), bracket_marker_re())) {
        out.emplace_back("starts_bracket_marker");
      }
      if (t.back() == '.') add("ends_period");
      if (t.back() == '-') add("ends_hyphen");
      if (on("has_year") && has_year(tokens)) out.emplace_back("has_year");
      if (on("has_page_range") &&
          std::regex_search(t.begin(), t.end(), page_range_re())) {
        out.emplace_back("has_page_range");
      }
      add_bucket("punct", std::to_string(bucket_of(static_cast<double>(punct_count(t)),
                                                   config_.punct_bounds)));
      std::size_t alpha = 0, caps = 0;
      for (auto tok : tokens) {
        const auto lc = text::first_letter_case(tok);
        if (lc == text::LetterCase::None) continue;
        ++alpha;
        if (lc == text::LetterCase::Upper) ++caps;
      }
      if (alpha > 0) {
        add_bucket("capratio",
                   std::to_string(bucket_of(static_cast<double>(caps) / alpha,
                                            config_.capratio_bounds)));
      }
      add_bucket("len", std::to_string(bucket_of(
                            static_cast<double>(text::codepoint_count(t)),
                            config_.length_bounds)));
      if (is_heading(i)) add("is_heading");
      if (names_ && on("name_hit")) {
        for (auto tok : tokens) {
          if (names_->count(text::to_lower(strip_token(tok))) != 0) {
            out.emplace_back("name_hit");
            break;
          }
        }
      }
    }

    // Layout templates fire only when the attributes are present.
    if (line.v_gap && median_gap_) {
      double ratio;
      if (*median_gap_ > 0) {
        ratio = *line.v_gap / *median_gap_;
      } else {
        ratio = *line.v_gap > 0 ? std::numeric_limits<double>::infinity() : 0.0;
      }
      add_bucket("vgap", std::to_string(bucket_of(ratio, config_.vgap_bounds)));
    }
    if (line.indent) {
      if (*line.indent > config_.indent_threshold) add("indented");
      if (*line.indent < -config_.indent_threshold) add("outdented");
    }
    if (i > 0 && line.font_size && doc_.lines[i - 1].font_size) {
      const double d = *line.font_size - *doc_.lines[i - 1].font_size;
      const char* sign = d > config_.font_dead_zone    ? "+"
                         : d < -config_.font_dead_zone ? "-"
                                                       : "0";
      add_bucket("fontsize_delta", sign);
    }
    if (line.bold && *line.bold) add("bold");
    return out;
  }

 private:
  const Document& doc_;
  const FeatureConfig& config_;
  std::unordered_set<std::string> headings_;
  std::optional<std::unordered_set<std::string>> names_;
  std::optional<double> median_gap_;
};

std::vector<std::string> combine(const std::vector<std::vector<std::string>>& locals,
                                 std::size_t first, std::size_t i, int window) {
  std::vector<std::string> out = locals[i - first];
  for (int o = -window; o <= window; ++o) {
    if (o == 0) continue;
    const auto j = static_cast<long long>(i) + o;
    if (j < static_cast<long long>(first) ||
        j >= static_cast<long long>(first + locals.size())) {
      continue;
    }
    for (const auto& name : locals[static_cast<std::size_t>(j) - first]) {
      out.push_back(with_offset(name, o));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void check_bounds(const std::vector<double>& b, const char* what) {
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (!(b[i - 1] < b[i])) {
      throw Error(ErrorKind::Config,
                  std::string(what) + " bucket boundaries must be strictly increasing");
    }
  }
}

}  // namespace

const std::vector<std::string>& all_templates() {
  static const std::vector<std::string> names = {
      "bias",           "starts_digit", "starts_bracket_marker", "ends_period",
      "ends_hyphen",    "has_year",     "has_page_range",        "punct",
      "capratio",       "len",          "is_empty",              "is_heading",
      "after_heading",  "relpos",       "name_hit",              "vgap",
      "indented",       "outdented",    "fontsize_delta",        "bold"};
  return names;
}

std::vector<std::string> default_heading_gazetteer() {
  return {"references", "bibliography", "references and notes",
          "literature", "literatur",    "literaturverzeichnis"};
}

void FeatureConfig::check() const {
  if (window < 0 || window > 3) {
    throw Error(ErrorKind::Config, "window must be in [0, 3]");
  }
  const auto& known = all_templates();
  for (const auto& t : templates) {
    if (std::find(known.begin(), known.end(), t) == known.end()) {
      throw Error(ErrorKind::Config, "unknown feature template '" + t + "'");
    }
  }
  check_bounds(vgap_bounds, "vgap");
  check_bounds(punct_bounds, "punct");
  check_bounds(capratio_bounds, "capratio");
  check_bounds(length_bounds, "length");
}

json to_json(const FeatureConfig& c) {
  json j = json::object();
  j["templates"] = std::vector<std::string>(c.templates.begin(), c.templates.end());
  j["window"] = c.window;
  j["heading_gazetteer"] = c.heading_gazetteer;
  j["name_gazetteer"] = c.name_gazetteer ? json(*c.name_gazetteer) : json(nullptr);
  j["vgap_bounds"] = c.vgap_bounds;
  j["punct_bounds"] = c.punct_bounds;
  j["capratio_bounds"] = c.capratio_bounds;
  j["length_bounds"] = c.length_bounds;
  j["indent_threshold"] = c.indent_threshold;
  j["font_dead_zone"] = c.font_dead_zone;
  return j;
}

FeatureConfig feature_config_from_json(const json& j, FeatureConfig c) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "feature config must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "templates") {
        c.templates.clear();
        for (const auto& t : v) c.templates.insert(t.get<std::string>());
      } else if (key == "window") {
        c.window = v.get<int>();
      } else if (key == "heading_gazetteer") {
        c.heading_gazetteer = v.get<std::vector<std::string>>();
      } else if (key == "name_gazetteer") {
        if (v.is_null()) {
          c.name_gazetteer.reset();
        } else {
          c.name_gazetteer = v.get<std::vector<std::string>>();
        }
      } else if (key == "vgap_bounds") {
        c.vgap_bounds = v.get<std::vector<double>>();
      } else if (key == "punct_bounds") {
        c.punct_bounds = v.get<std::vector<double>>();
      } else if (key == "capratio_bounds") {
        c.capratio_bounds = v.get<std::vector<double>>();
      } else if (key == "length_bounds") {
        c.length_bounds = v.get<std::vector<double>>();
      } else if (key == "indent_threshold") {
        c.indent_threshold = v.get<double>();
      } else if (key == "font_dead_zone") {
        c.font_dead_zone = v.get<double>();
      } else {
        throw Error(ErrorKind::Config, "unknown feature config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad feature config: ") + e.what());
  }
  c.check();
  return c;
}

std::vector<std::string> read_gazetteer_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open gazetteer '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(t);
  }
  return out;
}

std::vector<std::string> extract_line_features(const Document& doc,
                                               std::size_t line_index,
                                               const FeatureConfig& config) {
  if (line_index >= doc.lines.size()) {
    throw Error(ErrorKind::Usage, "line index " + std::to_string(line_index) +
                                      " out of range for document '" + doc.doc_id +
                                      "' with " + std::to_string(doc.lines.size()) +
                                      " lines");
  }
  const DocumentContext ctx(doc, config);
  const auto w = static_cast<std::size_t>(config.window);
  const std::size_t first = line_index >= w ? line_index - w : 0;
  const std::size_t last = std::min(doc.lines.size() - 1, line_index + w);

  bool heading_before = false;
  for (std::size_t j = 0; j < first && !heading_before; ++j) {
    heading_before = ctx.is_heading(j);
  }
  std::vector<std::vector<std::string>> locals;
  for (std::size_t j = first; j <= last; ++j) {
    locals.push_back(ctx.local(j, heading_before));
    heading_before = heading_before || ctx.is_heading(j);
  }
  return combine(locals, first, line_index, config.window);
}

std::vector<std::vector<std::string>> extract_document_features(
    const Document& doc, const FeatureConfig& config) {
  const DocumentContext ctx(doc, config);
  std::vector<std::vector<std::string>> locals;
  locals.reserve(doc.lines.size());
  bool heading_before = false;
  for (std::size_t j = 0; j < doc.lines.size(); ++j) {
    locals.push_back(ctx.local(j, heading_before));
    heading_before = heading_before || ctx.is_heading(j);
  }
  std::vector<std::vector<std::string>> out;
  out.reserve(doc.lines.size());
  for (std::size_t i = 0; i < doc.lines.size(); ++i) {
    out.push_back(combine(locals, 0, i, config.window));
  }
  return out;
}

std::optional<FeatureName> parse_feature_name(std::string_view name) {
  FeatureName out;
  const auto eq = name.find('=');
  std::string_view head = name.substr(0, eq);
  if (eq != std::string_view::npos) {
    out.bucket = std::string(name.substr(eq + 1));
    if (out.bucket->empty()) return std::nullopt;
  }
  const auto at = head.find('@');
  if (at != std::string_view::npos) {
    const auto off = head.substr(at + 1);
    if (off.size() < 2 || (off[0] != '+' && off[0] != '-')) return std::nullopt;
    int v = 0;
    for (char c : off.substr(1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      v = v * 10 + (c - '0');
    }
    if (v == 0) return std::nullopt;
    out.offset = off[0] == '-' ? -v : v;
    head = head.substr(0, at);
  }
  if (head.empty()) return std::nullopt;
  for (char c : head) {
    if (!(std::islower(static_cast<unsigned char>(c)) || c == '_')) return std::nullopt;
  }
  out.template_name = std::string(head);
  return out;
}

std::string format_feature_name(const FeatureName& name) {
  std::string s = name.template_name;
  if (name.offset) {
    s += *name.offset > 0 ? "@+" : "@-";
    s += std::to_string(std::abs(*name.offset));
  }
  if (name.bucket) s += "=" + *name.bucket;
  return s;
}

}  // namespace reflines
