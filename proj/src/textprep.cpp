#include "autolabel/textprep.hpp"

#include <cctype>
#include <fstream>

#include "autolabel/errors.hpp"

namespace autolabel::textprep {

namespace {

inline bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c == '_'; }

inline bool is_space(unsigned char c) { return std::isspace(c) != 0; }

}  // namespace

std::string clean_for_labelling(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t end = i;
    while (end < n && !is_space(static_cast<unsigned char>(text[end]))) ++end;
    if (end == i) break;

    std::string token;
    token.reserve(end - i);
    for (std::size_t p = i; p < end; ++p)
      if (text[p] != '#' && text[p] != '$') token += text[p];
    i = end;

    // drop the @ and the username; repeats handle chained mentions like @a@b
    while (!token.empty() && token[0] == '@') {
      std::size_t skip = 1;
      while (skip < token.size() && is_word_char(static_cast<unsigned char>(token[skip])))
        ++skip;
      token.erase(0, skip);
    }

    if (token.empty()) continue;
    if (token.size() == 2 && (token[0] == 'R' || token[0] == 'r') &&
        (token[1] == 'T' || token[1] == 't'))
      continue;  // retweet marker

    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

TokenList tokenize(std::string_view lowercased) {
  TokenList tokens;
  std::string cur;
  auto flush = [&] {
    std::size_t b = 0, e = cur.size();
    while (b < e && cur[b] == '\'') ++b;
    while (e > b && cur[e - 1] == '\'') --e;
    if (e > b) tokens.push_back(cur.substr(b, e - b));
    cur.clear();
  };
  for (const char c : lowercased) {
    if ((c >= 'a' && c <= 'z') || c == '\'') {
      cur += c;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TokenList preprocess_for_model(std::string_view text, const StopwordPolicy& policy,
                               const WordSet& junk_words) {
  std::string lower(text);
  for (char& c : lower)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');

  std::string cleaned = clean_for_labelling(lower);

  std::string no_digits;
  no_digits.reserve(cleaned.size());
  for (const char c : cleaned)
    if (c < '0' || c > '9') no_digits += c;

  TokenList tokens = tokenize(no_digits);
  TokenList out;
  out.reserve(tokens.size());
  for (auto& tok : tokens) {
    if (policy.removes(tok) || junk_words.count(tok) != 0) continue;
    out.push_back(std::move(tok));
  }
  return out;
}

WordSet load_wordset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word list: " + path.string());
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

StopwordPolicy load_stopword_policy(const std::filesystem::path& stoplist,
                                    const std::filesystem::path& exceptions) {
  return StopwordPolicy{load_wordset(stoplist), load_wordset(exceptions)};
}

}  // namespace autolabel::textprep
