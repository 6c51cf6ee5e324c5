#include "autolabel/lexlabel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <vector>

#include "autolabel/errors.hpp"
#include "autolabel/textprep.hpp"

namespace autolabel::lexlabel {

namespace {

// heuristic constants of the valence engine, in one place
constexpr double kAlpha = 15.0;           // compound normalization
constexpr double kCapsIncrement = 0.733;  // ALL-CAPS emphasis
constexpr double kNegationFactor = -0.74;
constexpr double kDampNear = 0.95;  // booster two tokens back
constexpr double kDampFar = 0.9;    // booster three tokens back
constexpr double kExclamationStep = 0.292;
constexpr int kExclamationCap = 3;
constexpr double kButBefore = 0.5;
constexpr double kButAfter = 1.5;

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

/// Lookup form of a raw whitespace token: lowercased, leading/trailing
/// non-alphanumerics stripped (keeps inner apostrophes and hyphens).
std::string lookup_form(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && !is_alnum(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && !is_alnum(static_cast<unsigned char>(raw[e - 1]))) --e;
  return ascii_lower(raw.substr(b, e - b));
}

std::vector<std::string> whitespace_split(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t end = i;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    if (end > i) tokens.emplace_back(text.substr(i, end - i));
    i = end;
  }
  return tokens;
}

/// python str.isupper semantics: at least one cased char, none lowercase.
bool is_all_caps(std::string_view token) {
  bool has_upper = false;
  for (const char c : token) {
    if (c >= 'a' && c <= 'z') return false;
    if (c >= 'A' && c <= 'Z') has_upper = true;
  }
  return has_upper;
}

struct LoadedLine {
  std::size_t line_no;
  std::string key;
  std::string rest;
};

/// Shared TSV walk: yields non-empty lines split at the first tab.
template <class Fn>
void for_each_tsv_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw MalformedLine(line_no, "expected word<TAB>value");
    fn(LoadedLine{line_no, line.substr(0, tab), line.substr(tab + 1)});
  }
}

double parse_real(const LoadedLine& l) {
  try {
    std::size_t used = 0;
    const std::string first = l.rest.substr(0, l.rest.find('\t'));
    const double v = std::stod(first, &used);
    if (used != first.size()) throw std::invalid_argument(first);
    return v;
  } catch (const std::exception&) {
    throw BadScore(l.line_no, "not a number: '" + l.rest + "'");
  }
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::Afinn: return "afinn";
    case Method::Vader: return "vader";
    default: return "textblob";
  }
}

Method parse_method(std::string_view name) {
  const std::string n = ascii_lower(name);
  if (n == "afinn") return Method::Afinn;
  if (n == "vader") return Method::Vader;
  if (n == "textblob") return Method::TextBlob;
  throw UnknownMethod(std::string(name));
}

AfinnLexicon load_afinn(const std::filesystem::path& path) {
  AfinnLexicon lex;
  for_each_tsv_line(path, [&](const LoadedLine& l) {
    const double raw = parse_real(l);
    const int score = static_cast<int>(raw);
    if (raw != static_cast<double>(score) || score < -5 || score > 5)
      throw BadScore(l.line_no, "'" + l.rest + "' outside integer [-5,5]");
    if (!lex.entries.emplace(l.key, score).second) {
      lex.entries[l.key] = score;  // last write wins
      ++lex.duplicate_count;
    }
  });
  if (lex.entries.empty())
    std::cerr << "warning: afinn lexicon " << path << " is empty\n";
  if (lex.duplicate_count > 0)
    std::cerr << "warning: " << lex.duplicate_count << " duplicate afinn entries (last wins)\n";
  return lex;
}

ValenceLexicon load_valence(const std::filesystem::path& lexicon,
                            const std::filesystem::path& boosters,
                            const std::filesystem::path& negators) {
  ValenceLexicon lex;
  for_each_tsv_line(lexicon, [&](const LoadedLine& l) {
    const double v = parse_real(l);
    if (!std::isfinite(v)) throw BadScore(l.line_no, "non-finite valence");
    if (!lex.entries.emplace(l.key, v).second) {
      lex.entries[l.key] = v;
      ++lex.duplicate_count;
    }
  });
  for_each_tsv_line(boosters, [&](const LoadedLine& l) {
    const double v = parse_real(l);
    if (!std::isfinite(v)) throw BadScore(l.line_no, "non-finite booster increment");
    lex.boosters[l.key] = v;
  });
  {
    std::ifstream in(negators);
    if (!in) throw DataError("cannot open negator file: " + negators.string());
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) lex.negators.insert(line);
    }
  }
  if (lex.negators.empty()) throw DataError("negator list is empty: " + negators.string());
  if (lex.duplicate_count > 0)
    std::cerr << "warning: " << lex.duplicate_count << " duplicate valence entries (last wins)\n";
  return lex;
}

PatternLexicon load_pattern(const std::filesystem::path& path) {
  PatternLexicon lex;
  for_each_tsv_line(path, [&](const LoadedLine& l) {
    const std::size_t tab = l.rest.find('\t');
    const std::string pol_s = l.rest.substr(0, tab);
    double pol = 0.0, subj = 0.0;
    try {
      pol = std::stod(pol_s);
      subj = tab == std::string::npos ? 0.0 : std::stod(l.rest.substr(tab + 1));
    } catch (const std::exception&) {
      throw BadScore(l.line_no, "not a number: '" + l.rest + "'");
    }
    if (pol < -1.0 || pol > 1.0) throw BadScore(l.line_no, "polarity outside [-1,1]");
    if (!lex.polarity.emplace(l.key, pol).second) {
      lex.polarity[l.key] = pol;
      ++lex.duplicate_count;
    }
    lex.subjectivity[l.key] = subj;
  });
  if (lex.duplicate_count > 0)
    std::cerr << "warning: " << lex.duplicate_count << " duplicate pattern entries (last wins)\n";
  return lex;
}

int afinn_score(std::string_view text, const AfinnLexicon& lex) {
  int sum = 0;
  for (const auto& tok : textprep::tokenize(ascii_lower(text))) {
    const auto it = lex.entries.find(tok);
    if (it != lex.entries.end()) sum += it->second;
  }
  return sum;
}

double vader_normalize(double valence_sum) {
  return valence_sum / std::sqrt(valence_sum * valence_sum + kAlpha);
}

VaderScores vader_scores(std::string_view text, const ValenceLexicon& lex) {
  const auto raw_tokens = whitespace_split(text);

  std::vector<std::string> raw, lookup;
  raw.reserve(raw_tokens.size());
  for (const auto& t : raw_tokens) {
    std::string form = lookup_form(t);
    if (form.empty()) continue;  // pure punctuation carries no token mass
    raw.push_back(t);
    lookup.push_back(std::move(form));
  }

  VaderScores scores;
  if (raw.empty()) {
    scores.neu = 1.0;
    return scores;
  }

  // emphasis only applies when SOME but not ALL tokens shout
  std::size_t caps_count = 0, cased_count = 0;
  for (const auto& t : raw) {
    bool has_alpha = std::any_of(t.begin(), t.end(), [](unsigned char c) {
      return std::isalpha(c) != 0;
    });
    if (!has_alpha) continue;
    ++cased_count;
    if (is_all_caps(t)) ++caps_count;
  }
  const bool cap_diff = caps_count > 0 && caps_count < cased_count;

  auto booster_increment = [&](std::size_t j, double valence) {
    const auto it = lex.boosters.find(lookup[j]);
    if (it == lex.boosters.end()) return 0.0;
    double s = it->second;
    if (valence < 0.0) s = -s;
    if (cap_diff && is_all_caps(raw[j])) s += valence > 0.0 ? kCapsIncrement : -kCapsIncrement;
    return s;
  };

  std::vector<double> sentiments(lookup.size(), 0.0);
  for (std::size_t i = 0; i < lookup.size(); ++i) {
    if (lex.boosters.count(lookup[i]) != 0) continue;  // boosters carry no own valence
    const auto it = lex.entries.find(lookup[i]);
    if (it == lex.entries.end()) continue;

    double v = it->second;
    if (cap_diff && is_all_caps(raw[i])) v += v > 0.0 ? kCapsIncrement : -kCapsIncrement;

    for (std::size_t dist = 0; dist < 3 && dist + 1 <= i; ++dist) {
      const std::size_t j = i - 1 - dist;
      if (lex.entries.count(lookup[j]) != 0) continue;  // scored words are not modifiers
      double s = booster_increment(j, v);
      if (s != 0.0) {
        if (dist == 1) s *= kDampNear;
        if (dist == 2) s *= kDampFar;
      }
      v += s;
      if (lex.negators.count(lookup[j]) != 0) v *= kNegationFactor;
    }
    sentiments[i] = v;
  }

  // contrastive conjunction: discount the clause before "but", stress the one after
  const auto but_it = std::find(lookup.begin(), lookup.end(), "but");
  if (but_it != lookup.end()) {
    const std::size_t but_idx = static_cast<std::size_t>(but_it - lookup.begin());
    for (std::size_t i = 0; i < sentiments.size(); ++i) {
      if (i < but_idx) sentiments[i] *= kButBefore;
      if (i > but_idx) sentiments[i] *= kButAfter;
    }
  }

  double sum = 0.0;
  for (const double v : sentiments) sum += v;

  int bangs = 0;
  for (const char c : text)
    if (c == '!') ++bangs;
  const double amp = std::min(bangs, kExclamationCap) * kExclamationStep;
  if (sum > 0.0)
    sum += amp;
  else if (sum < 0.0)
    sum -= amp;

  scores.compound = vader_normalize(sum);

  double pos_mass = 0.0, neg_mass = 0.0;
  std::size_t neutral_count = 0;
  for (const double v : sentiments) {
    if (v > 0.0)
      pos_mass += v + 1.0;  // +-1 compensates neutral tokens counting as 1
    else if (v < 0.0)
      neg_mass += v - 1.0;
    else
      ++neutral_count;
  }
  if (pos_mass > std::fabs(neg_mass))
    pos_mass += amp;
  else if (pos_mass < std::fabs(neg_mass))
    neg_mass -= amp;

  const double total = pos_mass + std::fabs(neg_mass) + static_cast<double>(neutral_count);
  if (total == 0.0) {
    scores.neu = 1.0;
    return scores;
  }
  scores.pos = pos_mass / total;
  scores.neg = std::fabs(neg_mass) / total;
  scores.neu = static_cast<double>(neutral_count) / total;
  return scores;
}

double pattern_polarity(std::string_view text, const PatternLexicon& lex,
                        const std::unordered_set<std::string>& negators) {
  double sum = 0.0;
  std::size_t matches = 0;
  bool pending_negation = false;
  for (const auto& tok : textprep::tokenize(ascii_lower(text))) {
    if (negators.count(tok) != 0) {
      pending_negation = true;
      continue;
    }
    const auto it = lex.polarity.find(tok);
    if (it == lex.polarity.end()) continue;
    sum += pending_negation ? -0.5 * it->second : it->second;
    pending_negation = false;
    ++matches;
  }
  return matches == 0 ? 0.0 : sum / static_cast<double>(matches);
}

SentimentLabel to_ternary(Method m, double score) {
  switch (m) {
    case Method::Vader:
      if (score > 0.05) return SentimentLabel::Positive;
      if (score < -0.05) return SentimentLabel::Negative;
      return SentimentLabel::Neutral;
    case Method::Afinn:
    case Method::TextBlob:
      if (score > 0.0) return SentimentLabel::Positive;
      if (score < 0.0) return SentimentLabel::Negative;
      return SentimentLabel::Neutral;
  }
  throw UnknownMethod("<invalid>");
}

Labeller::Labeller(AfinnLexicon afinn, ValenceLexicon valence, PatternLexicon pattern)
    : afinn_(std::move(afinn)), valence_(std::move(valence)), pattern_(std::move(pattern)) {}

Labeller Labeller::load_dir(const std::filesystem::path& dir) {
  return Labeller(load_afinn(dir / "afinn.tsv"),
                  load_valence(dir / "vader_lexicon.tsv", dir / "vader_boosters.tsv",
                               dir / "vader_negators.txt"),
                  load_pattern(dir / "pattern_polarity.tsv"));
}

double Labeller::score(std::string_view cleaned_text, Method m) const {
  switch (m) {
    case Method::Afinn: return static_cast<double>(afinn_score(cleaned_text, afinn_));
    case Method::Vader: return vader_scores(cleaned_text, valence_).compound;
    case Method::TextBlob: return pattern_polarity(cleaned_text, pattern_, valence_.negators);
  }
  throw UnknownMethod("<invalid>");
}

SentimentLabel Labeller::label_text(std::string_view raw_text, Method m) const {
  return to_ternary(m, score(textprep::clean_for_labelling(raw_text), m));
}

corpus::Dataset Labeller::label_dataset(const corpus::Dataset& ds, Method m) const {
  corpus::Dataset out = ds;
  const std::string key = to_string(m);
  for (auto& inst : out.instances) inst.auto_labels[key] = label_text(inst.text, m);
  return out;
}

}  // namespace autolabel::lexlabel
