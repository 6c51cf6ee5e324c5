#include <doctest.h>

#include <cmath>

#include "autolabel/corpus.hpp"
#include "autolabel/errors.hpp"
#include "autolabel/evalx.hpp"
#include "autolabel/lexlabel.hpp"
#include "autolabel/textprep.hpp"
#include "test_support.hpp"

using namespace autolabel;
using namespace autolabel::lexlabel;

namespace {

const Labeller& shipped_labeller() {
  static const Labeller labeller = Labeller::load_dir(testsup::data_dir());
  return labeller;
}

}  // namespace

TEST_SUITE("lexlabel") {

TEST_CASE("afinn loader validates scores") {
  testsup::TempDir tmp;
  testsup::write_file(tmp.file("ok.tsv"), "good\t3\nbad\t-3\n");
  const auto lex = load_afinn(tmp.file("ok.tsv"));
  CHECK(lex.entries.at("good") == 3);
  CHECK(lex.entries.at("bad") == -3);

  testsup::write_file(tmp.file("range.tsv"), "bad\t9\n");
  CHECK_THROWS_AS(load_afinn(tmp.file("range.tsv")), BadScore);

  testsup::write_file(tmp.file("frac.tsv"), "bad\t1.5\n");
  CHECK_THROWS_AS(load_afinn(tmp.file("frac.tsv")), BadScore);

  testsup::write_file(tmp.file("empty.tsv"), "");
  CHECK(load_afinn(tmp.file("empty.tsv")).entries.empty());  // warning only

  testsup::write_file(tmp.file("dup.tsv"), "good\t1\ngood\t2\n");
  const auto dup = load_afinn(tmp.file("dup.tsv"));
  CHECK(dup.entries.at("good") == 2);  // last write wins
  CHECK(dup.duplicate_count == 1);
}

TEST_CASE("afinn_score sums matched tokens") {
  const auto& lex = shipped_labeller().afinn();
  CHECK(lex.entries.at("good") == 3);  // shipped AFINN value
  CHECK(afinn_score("", lex) == 0);
  CHECK(afinn_score("good good", lex) == 6);
  CHECK(afinn_score("GOOD, good!", lex) == 6);  // case and punctuation insensitive
  CHECK(afinn_score("qqqq zzzz", lex) == 0);
}

TEST_CASE("afinn additivity over concatenation") {
  const auto& lex = shipped_labeller().afinn();
  const char* snippets[] = {"good day",      "bad terrible loss", "nothing here",
                            "love and hate", "win win win",       ""};
  for (const auto* a : snippets)
    for (const auto* b : snippets) {
      const std::string joined = std::string(a) + " " + b;
      CHECK(afinn_score(joined, lex) == afinn_score(a, lex) + afinn_score(b, lex));
    }
}

TEST_CASE("vader normalization formula and bounds") {
  CHECK(vader_normalize(0.0) == 0.0);
  CHECK(vader_normalize(4.0) == doctest::Approx(0.7184212081070996).epsilon(1e-12));
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double s = -50.0 + 0.1 * i;
    const double c = vader_normalize(s);
    CHECK(std::fabs(c) < 1.0);
    CHECK(c > prev);  // strictly increasing
    prev = c;
  }
}

TEST_CASE("vader scores: trivial and structural cases") {
  const auto& lex = shipped_labeller().valence();

  const auto none = vader_scores("qqqq zzzz wwww", lex);
  CHECK(none.compound == 0.0);
  CHECK(none.neu == doctest::Approx(1.0));

  const auto empty = vader_scores("", lex);
  CHECK(empty.compound == 0.0);
  CHECK(empty.neu == doctest::Approx(1.0));

  const char* texts[] = {"good",      "I really love this GREAT day!",
                         "not good",  "terrible but kind of fine",
                         "so so bad", "you are horrible!!!"};
  for (const auto* t : texts) {
    const auto s = vader_scores(t, lex);
    CAPTURE(t);
    CHECK(s.neg + s.neu + s.pos == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(s.compound) < 1.0);
    CHECK(s.neg >= 0.0);
    CHECK(s.pos >= 0.0);
    CHECK(s.neu >= 0.0);
  }
}

TEST_CASE("vader heuristics move the compound in the right direction") {
  const auto& lex = shipped_labeller().valence();
  const double base = vader_scores("good", lex).compound;
  CHECK(base > 0.05);

  CHECK(vader_scores("very good", lex).compound > base);              // booster
  CHECK(vader_scores("not good", lex).compound < 0.0);                // negation
  CHECK(vader_scores("GOOD day", lex).compound > base);               // caps emphasis
  CHECK(vader_scores("good!", lex).compound > base);                  // exclamation
  CHECK(vader_scores("good!!!!!!", lex).compound ==
        vader_scores("good!!!", lex).compound);                       // capped at 3
  CHECK(vader_scores("good but bad", lex).compound <
        vader_scores("bad but good", lex).compound);                  // but reweighting
}

TEST_CASE("pattern polarity basics") {
  const auto& lex = shipped_labeller().pattern();
  const auto& negators = shipped_labeller().valence().negators;

  CHECK(pattern_polarity("", lex, negators) == 0.0);
  CHECK(pattern_polarity("great", lex, negators) == doctest::Approx(0.8));  // shipped value
  CHECK(pattern_polarity("great terrible", lex, negators) ==
        doctest::Approx((0.8 - 1.0) / 2.0));
  CHECK(pattern_polarity("not great", lex, negators) == doctest::Approx(-0.4));
  CHECK(pattern_polarity("qqqq zzzz", lex, negators) == 0.0);
}

TEST_CASE("to_ternary thresholds") {
  CHECK(to_ternary(Method::Vader, 0.1027) == SentimentLabel::Positive);
  CHECK(to_ternary(Method::Vader, 0.05) == SentimentLabel::Neutral);  // strict inequality
  CHECK(to_ternary(Method::Vader, -0.05) == SentimentLabel::Neutral);
  CHECK(to_ternary(Method::Vader, -0.0501) == SentimentLabel::Negative);
  CHECK(to_ternary(Method::Afinn, -1.0) == SentimentLabel::Negative);
  CHECK(to_ternary(Method::Afinn, 0.0) == SentimentLabel::Neutral);
  CHECK(to_ternary(Method::Afinn, 1.0) == SentimentLabel::Positive);
  CHECK(to_ternary(Method::TextBlob, 0.0) == SentimentLabel::Neutral);
  CHECK(to_ternary(Method::TextBlob, -0.1) == SentimentLabel::Negative);
  CHECK_THROWS_AS(parse_method("sentiwordnet"), UnknownMethod);
}

TEST_CASE("worked example: the three engines disagree exactly as published") {
  const auto& labeller = shipped_labeller();
  const std::string text = "install the newest version and you may change your mind!";
  CHECK(labeller.label_text(text, Method::TextBlob) == SentimentLabel::Neutral);
  CHECK(labeller.label_text(text, Method::Vader) == SentimentLabel::Positive);
  CHECK(labeller.label_text(text, Method::Afinn) == SentimentLabel::Positive);
}

TEST_CASE("label_dataset sets the method column and touches nothing else") {
  corpus::Dataset ds;
  ds.name = "t";
  ds.instances.push_back({"a", "what a great wonderful day", SentimentLabel::Negative, {}});
  ds.instances.push_back({"b", "", std::nullopt, {}});
  ds.instances.push_back({"c", "this is terrible and awful", SentimentLabel::Positive, {}});

  for (const auto method : {Method::Afinn, Method::Vader, Method::TextBlob}) {
    const auto out = shipped_labeller().label_dataset(ds, method);
    REQUIRE(out.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(out.instances[i].text == ds.instances[i].text);
      CHECK(out.instances[i].gold_label == ds.instances[i].gold_label);
      CHECK(out.instances[i].auto_labels.count(to_string(method)) == 1);
    }
    // empty text scores zero everywhere
    CHECK(out.instances[1].auto_labels.at(to_string(method)) == SentimentLabel::Neutral);
  }

  const auto afinn_out = shipped_labeller().label_dataset(ds, Method::Afinn);
  CHECK(afinn_out.instances[0].auto_labels.at("afinn") == SentimentLabel::Positive);
  CHECK(afinn_out.instances[2].auto_labels.at("afinn") == SentimentLabel::Negative);
}

TEST_CASE("labelling is deterministic across repeated runs") {
  Rng rng(5);
  std::vector<std::string> texts;
  for (int i = 0; i < 200; ++i) texts.push_back(testsup::random_text(rng, 50));
  for (const auto method : {Method::Afinn, Method::Vader, Method::TextBlob}) {
    for (const auto& t : texts) {
      const auto a = shipped_labeller().label_text(t, method);
      const auto b = shipped_labeller().label_text(t, method);
      CHECK(a == b);
    }
  }
}

TEST_CASE("afinn engine recovers gold labels on a lexicon-aligned synthetic corpus") {
  const auto& labeller = shipped_labeller();
  corpus::SynthVocab vocab;
  vocab.positive = {"good", "great", "love", "happy", "win"};
  vocab.negative = {"bad", "hate", "terrible", "sad", "loss"};
  vocab.neutral = {"table", "chair", "window", "walk", "street"};

  // the neutral pool must really be score-zero words
  for (const auto& w : vocab.neutral) REQUIRE(labeller.afinn().entries.count(w) == 0);
  for (const auto& w : vocab.positive) REQUIRE(labeller.afinn().entries.at(w) > 0);
  for (const auto& w : vocab.negative) REQUIRE(labeller.afinn().entries.at(w) < 0);

  const auto ds = corpus::synth_corpus(100, vocab, 11);
  const auto labelled = labeller.label_dataset(ds, Method::Afinn);

  std::vector<SentimentLabel> gold, automatic;
  for (const auto& inst : labelled.instances) {
    gold.push_back(*inst.gold_label);
    automatic.push_back(inst.auto_labels.at("afinn"));
  }
  CHECK(evalx::agreement(gold, automatic) >= 95.0);
}

}  // TEST_SUITE
