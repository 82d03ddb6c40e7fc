#include <algorithm>
#include <set>

#include "doctest.h"
#include "reflines/error.hpp"
#include "reflines/extraction.hpp"
#include "reflines/features.hpp"
#include "reflines/synthgen.hpp"
#include "support.hpp"

using namespace reflines;

namespace {

std::size_t count(const std::vector<Label>& y, Label l) {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), l));
}

bool is_heading_line(const LineRecord& l) {
  const auto h = default_heading_gazetteer();
  std::string t = l.text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  return std::find(h.begin(), h.end(), t) != h.end();
}

std::vector<LabeledDocument> corpus(GenMode mode, std::uint64_t seed, int n,
                                    RefStyle style = RefStyle::Mixed) {
  GenConfig g;
  g.seed = seed;
  g.n_documents = n;
  g.mode = mode;
  g.style = style;
  return generate(g);
}

}  // namespace

TEST_CASE("a small end-section document") {
  GenConfig g;
  g.seed = 1;
  g.n_documents = 1;
  g.references_per_document = {2, 2};
  g.body_pages = {1, 1};
  g.body_lines_per_page = {5, 5};
  g.page_height = 1000;
  const auto docs = generate(g);
  REQUIRE(docs.size() == 1);
  const auto& y = docs[0].labels;
  CHECK(count(y, Label::BRef) == 2);
  CHECK(count(y, Label::ORef) == 0);
  CHECK(count(y, Label::O) >= 1);
  const auto first_ref = std::find(y.begin(), y.end(), Label::BRef) - y.begin();
  bool heading = false;
  for (long i = 0; i < first_ref; ++i) heading |= is_heading_line(docs[0].document.lines[static_cast<std::size_t>(i)]);
  CHECK(heading);
}

TEST_CASE("page splits inside references insert O-REF lines") {
  GenConfig g;
  g.seed = 2;
  g.n_documents = 5;
  g.page_height = 8;
  const auto docs = generate(g);
  bool found = false;
  for (const auto& d : docs) {
    const auto& y = d.labels;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
      if (y[i] != Label::ORef) continue;
      std::size_t j = i;
      while (j < y.size() && y[j] == Label::ORef) ++j;
      if ((y[i - 1] == Label::IRef || y[i - 1] == Label::BRef) && j < y.size() &&
          y[j] == Label::IRef) {
        found = true;
        CHECK(d.document.lines[j].page > d.document.lines[i - 1].page);
        CHECK(j - i <= 2);
      }
    }
  }
  CHECK(found);
}

TEST_CASE("same config, same corpus") {
  for (GenMode mode : {GenMode::EndSection, GenMode::Footnotes}) {
    CHECK(corpus(mode, 5, 4) == corpus(mode, 5, 4));
    CHECK_FALSE(corpus(mode, 5, 4) == corpus(mode, 6, 4));
  }
}

TEST_CASE("generated corpora are well formed") {
  for (GenMode mode : {GenMode::EndSection, GenMode::Footnotes}) {
    for (RefStyle style : {RefStyle::Numbered, RefStyle::AuthorYear, RefStyle::Mixed}) {
      for (const auto& d : corpus(mode, 40, 15, style)) {
        CHECK(validate(d).empty());
        const auto& y = d.labels;
        REQUIRE(y.size() == d.document.lines.size());
        // O-REF only between lines of one reference.
        for (std::size_t i = 0; i < y.size(); ++i) {
          if (y[i] != Label::ORef) continue;
          std::size_t j = i;
          while (j < y.size() && y[j] == Label::ORef) ++j;
          REQUIRE(i > 0);
          CHECK((y[i - 1] == Label::BRef || y[i - 1] == Label::IRef));
          REQUIRE(j < y.size());
          CHECK(y[j] == Label::IRef);
          i = j;
        }
        for (const auto& r : group(d.document.lines, y)) {
          CHECK_FALSE(r.promoted);
          CHECK(r.line_indices.size() <= 4);
        }
        for (const auto& l : d.document.lines) {
          CHECK(l.text.find('\n') == std::string::npos);
          if (l.v_gap) CHECK(*l.v_gap >= 0);
        }
      }
    }
  }
}

TEST_CASE("footnote mode has no reference heading and spreads references over pages") {
  for (const auto& d : corpus(GenMode::Footnotes, 41, 10)) {
    for (const auto& l : d.document.lines) CHECK_FALSE(is_heading_line(l));
    std::set<int> pages;
    for (const auto& r : group(d.document.lines, d.labels)) {
      pages.insert(d.document.lines[r.line_indices[0]].page);
    }
    CHECK(pages.size() >= 2);
  }
}

TEST_CASE("footnotes are set in a smaller font when layout is present") {
  int compared = 0;
  for (const auto& d : corpus(GenMode::Footnotes, 42, 10)) {
    double body = 0, notes = 0;
    int nb = 0, nn = 0;
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
      const auto& l = d.document.lines[i];
      if (!l.font_size) continue;
      if (d.labels[i] == Label::BRef) {
        notes += *l.font_size;
        ++nn;
      } else if (d.labels[i] == Label::O && l.text.size() > 40) {
        body += *l.font_size;
        ++nb;
      }
    }
    if (nb && nn) {
      ++compared;
      CHECK(notes / nn < body / nb);
    }
  }
  CHECK(compared > 0);
}

TEST_CASE("invalid configurations") {
  GenConfig g;
  g.references_per_document = {5, 2};
  CHECK_THROWS_AS(generate(g), Error);
  g = {};
  g.hyphenation_probability = 1.5;
  CHECK_THROWS_AS(generate(g), Error);
  g = {};
  g.page_height = 1;
  CHECK_THROWS_AS(generate(g), Error);
}
