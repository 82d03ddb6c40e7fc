#include "reflines/label.hpp"

namespace reflines {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::BRef: return "B-REF";
    case Label::IRef: return "I-REF";
    case Label::ORef: return "O-REF";
    case Label::O: return "O";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view s) {
  for (Label l : kAllLabels) {
    if (s == to_string(l)) return l;
  }
  return std::nullopt;
}

}  // namespace reflines
