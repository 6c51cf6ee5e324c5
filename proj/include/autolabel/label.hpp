#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace autolabel {

/// Ternary sentiment class. Column order everywhere is Positive, Negative, Neutral.
enum class SentimentLabel { Positive = 0, Negative = 1, Neutral = 2 };

inline const char* to_string(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::Positive: return "positive";
    case SentimentLabel::Negative: return "negative";
    default: return "neutral";
  }
}

/// Case-insensitive parse; returns nullopt for anything that is not one of
/// positive/negative/neutral.
std::optional<SentimentLabel> parse_label(std::string_view s);

}  // namespace autolabel
