#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace autolabel::textprep {

using TokenList = std::vector<std::string>;
using WordSet = std::unordered_set<std::string>;

/// Label-time cleaning: strips @mentions (the @ and the username), the
/// standalone token RT (any case), and all '#'/'$' characters, then collapses
/// whitespace. Punctuation and casing survive so the valence engine's
/// heuristics still fire. Total and idempotent.
std::string clean_for_labelling(std::string_view text);

/// Lowercase tokenizer over [a-z'] runs; leading/trailing apostrophes are
/// trimmed, intra-word ones ("don't") kept.
TokenList tokenize(std::string_view lowercased);

struct StopwordPolicy {
  WordSet stoplist;
  WordSet keep_exceptions;

  /// True when the word is in the effective removal set stoplist \ exceptions.
  bool removes(const std::string& word) const {
    return stoplist.count(word) != 0 && keep_exceptions.count(word) == 0;
  }
};

/// Model-time pipeline: lowercase, label-clean, strip digits, tokenize, then
/// drop effective stopwords and junk words. May return an empty list.
TokenList preprocess_for_model(std::string_view text, const StopwordPolicy& policy,
                               const WordSet& junk_words);

/// One word per line, UTF-8; blank lines ignored.
WordSet load_wordset(const std::filesystem::path& path);

StopwordPolicy load_stopword_policy(const std::filesystem::path& stoplist,
                                    const std::filesystem::path& exceptions);

}  // namespace autolabel::textprep
