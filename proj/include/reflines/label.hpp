#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace reflines {

/// Line label. The enumerator order is the tie-breaking order used by the
/// decoder: B_REF < I_REF < O_REF < O.
enum class Label : std::uint8_t {
  BRef = 0,  // first line of a reference string
  IRef = 1,  // continuation line of a reference string
  ORef = 2,  // line interleaved inside a reference but not part of it
  O = 3,     // anything else
};

inline constexpr int kNumLabels = 4;

inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::BRef, Label::IRef, Label::ORef, Label::O};

constexpr int index_of(Label l) { return static_cast<int>(l); }
constexpr Label label_at(int i) { return static_cast<Label>(i); }

/// "B-REF", "I-REF", "O-REF" or "O".
std::string_view to_string(Label l);

std::optional<Label> parse_label(std::string_view s);

}  // namespace reflines
