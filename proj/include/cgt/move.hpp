#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cgt/proposition.hpp"

namespace cgt {

enum class MoveLabel { statement, accept, doubt, observation, inference, question, answer };

std::string_view label_name(MoveLabel label) noexcept;
/// Accepts the upper-case names ("STATEMENT", ...), case-insensitively.
std::optional<MoveLabel> parse_label(std::string_view text) noexcept;

/// One dialogue act. `prop` is filled in by resolution; `prop_text` is the
/// proposition as it appeared in the log (canonical text once resolved).
struct Move {
  std::string utterance_id;
  std::string group_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string participant;
  std::string text;
  std::optional<MoveLabel> label;
  std::optional<std::string> prop_text;
  std::optional<PropFormula> prop;
  /// Set by resolution when a STATEMENT/ACCEPT has no usable proposition.
  bool unresolved = false;

  bool needs_proposition() const noexcept {
    return label == MoveLabel::statement || label == MoveLabel::accept;
  }
};

}  // namespace cgt
