#include "cgt/move.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace cgt {

namespace {

constexpr std::array<std::pair<MoveLabel, std::string_view>, 7> kLabels{{
    {MoveLabel::statement, "STATEMENT"},
    {MoveLabel::accept, "ACCEPT"},
    {MoveLabel::doubt, "DOUBT"},
    {MoveLabel::observation, "OBSERVATION"},
    {MoveLabel::inference, "INFERENCE"},
    {MoveLabel::question, "QUESTION"},
    {MoveLabel::answer, "ANSWER"},
}};

}  // namespace

std::string_view label_name(MoveLabel label) noexcept {
  for (const auto& [l, name] : kLabels) {
    if (l == label) return name;
  }
  return "UNKNOWN";
}

std::optional<MoveLabel> parse_label(std::string_view text) noexcept {
  for (const auto& [l, name] : kLabels) {
    if (text.size() == name.size() &&
        std::equal(text.begin(), text.end(), name.begin(), [](char a, char b) {
          return std::toupper(static_cast<unsigned char>(a)) == b;
        })) {
      return l;
    }
  }
  return std::nullopt;
}

}  // namespace cgt
