#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "autolabel/corpus.hpp"
#include "autolabel/label.hpp"

namespace autolabel::lexlabel {

enum class Method { Afinn, Vader, TextBlob };

const char* to_string(Method m);
Method parse_method(std::string_view name);  // throws UnknownMethod

/// word -> integer score in [-5, 5].
struct AfinnLexicon {
  std::unordered_map<std::string, int> entries;
  std::size_t duplicate_count = 0;
};

/// Valence table plus the heuristic companion sets. Booster keys may be
/// bigrams ("kind of"); increments are signed.
struct ValenceLexicon {
  std::unordered_map<std::string, double> entries;
  std::unordered_map<std::string, double> boosters;
  std::unordered_set<std::string> negators;
  std::size_t duplicate_count = 0;
};

/// word -> polarity in [-1, 1]; subjectivity stored but unused.
struct PatternLexicon {
  std::unordered_map<std::string, double> polarity;
  std::unordered_map<std::string, double> subjectivity;
  std::size_t duplicate_count = 0;
};

struct VaderScores {
  double neg = 0.0;
  double neu = 0.0;
  double pos = 0.0;
  double compound = 0.0;
};

AfinnLexicon load_afinn(const std::filesystem::path& path);
ValenceLexicon load_valence(const std::filesystem::path& lexicon,
                            const std::filesystem::path& boosters,
                            const std::filesystem::path& negators);
PatternLexicon load_pattern(const std::filesystem::path& path);

/// Sum of lexicon scores over lowercase tokens; unmatched tokens contribute 0.
/// Input is expected to have passed clean_for_labelling.
int afinn_score(std::string_view text, const AfinnLexicon& lex);

/// Simplified valence-aware scoring: per-token lexicon valence adjusted by
/// booster words (distance-damped), negation over the three preceding tokens,
/// ALL-CAPS emphasis, '!' amplification (capped at 3 marks) and "but"-clause
/// reweighting; compound = s / sqrt(s^2 + 15).
VaderScores vader_scores(std::string_view text, const ValenceLexicon& lex);

/// Normalizes an adjusted valence sum into (-1, 1). Exposed for tests.
double vader_normalize(double valence_sum);

/// Mean polarity of matched words; a negator token flips/halves the next
/// matched word (factor -0.5). No matches -> 0.
double pattern_polarity(std::string_view text, const PatternLexicon& lex,
                        const std::unordered_set<std::string>& negators);

/// Ternary rule per method: afinn/textblob use the sign with 0 -> Neutral,
/// vader uses the +-0.05 compound band.
SentimentLabel to_ternary(Method m, double score);

/// The three engines behind one loaded bundle.
class Labeller {
 public:
  Labeller(AfinnLexicon afinn, ValenceLexicon valence, PatternLexicon pattern);

  /// Loads afinn.tsv, vader_lexicon.tsv, vader_boosters.tsv,
  /// vader_negators.txt and pattern_polarity.tsv from one directory.
  static Labeller load_dir(const std::filesystem::path& dir);

  /// Raw scalar score of an already-cleaned text.
  double score(std::string_view cleaned_text, Method m) const;

  /// clean_for_labelling -> engine -> to_ternary.
  SentimentLabel label_text(std::string_view raw_text, Method m) const;

  /// Copy of ds with auto_labels[method] set on every instance; gold labels
  /// and texts are untouched.
  corpus::Dataset label_dataset(const corpus::Dataset& ds, Method m) const;

  const AfinnLexicon& afinn() const { return afinn_; }
  const ValenceLexicon& valence() const { return valence_; }
  const PatternLexicon& pattern() const { return pattern_; }

 private:
  AfinnLexicon afinn_;
  ValenceLexicon valence_;
  PatternLexicon pattern_;
};

}  // namespace autolabel::lexlabel
