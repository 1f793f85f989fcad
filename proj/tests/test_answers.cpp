#include "selfplay/answers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace selfplay;

TEST_CASE("canonicalize trims, lowercases, strips punctuation") {
  CHECK(canonicalize_answer(" 42 ") == "42");
  CHECK(canonicalize_answer("Paris.") == "paris");
  CHECK(canonicalize_answer("\"YES\"") == "yes");
  CHECK(canonicalize_answer("  The Answer  ") == "the answer");
}

TEST_CASE("canonicalize re-serializes numbers") {
  // oracle: parse-then-reserialize
  CHECK(canonicalize_answer("3.50") == "3.5");
  CHECK(canonicalize_answer("42.0") == "42");
  CHECK(canonicalize_answer("-5") == "-5");
  CHECK(canonicalize_answer("+7") == "7");
  CHECK(canonicalize_answer("1e3") == "1000");
  CHECK(canonicalize_answer("$3.50") == "3.5");
  CHECK(canonicalize_answer("0.5") == canonicalize_answer(".5"));
  CHECK(canonicalize_answer("-0") == "0");
}

TEST_CASE("canonicalize failure cases") {
  CHECK_FALSE(canonicalize_answer(""));
  CHECK_FALSE(canonicalize_answer("   "));
  CHECK_FALSE(canonicalize_answer("..."));
}

TEST_CASE("extract_answer locates the first tag span") {
  const auto s = extract_answer("The sum is <answer>7</answer>");
  REQUIRE(s);
  CHECK(s->canonical == "7");
  CHECK(s->words_before_answer == 3);  // The, sum, is

  const auto bare = extract_answer("<answer>yes</answer>");
  REQUIRE(bare);
  CHECK(bare->canonical == "yes");
  CHECK(bare->words_before_answer == 0);
}

TEST_CASE("extract_answer failure and edge cases") {
  CHECK_FALSE(extract_answer("no tag here"));
  CHECK_FALSE(extract_answer("empty <answer>  </answer>"));

  // missing closing tag runs to end of text
  const auto open_ended = extract_answer("so the result is <answer>12.0");
  REQUIRE(open_ended);
  CHECK(open_ended->canonical == "12");
  CHECK(open_ended->words_before_answer == 4);

  // first span wins
  const auto twice = extract_answer("<answer>a</answer> and <answer>b</answer>");
  REQUIRE(twice);
  CHECK(twice->canonical == "a");
}

TEST_CASE("build_distribution counts, sorts, and breaks ties") {
  auto mk = [](std::string c) {
    AnswerSample s;
    s.canonical = std::move(c);
    return s;
  };

  SUBCASE("degenerate distribution") {
    std::vector<AnswerSample> samples(5, mk("7"));
    const auto dist = build_distribution(samples, 5);
    CHECK(dist.classes.size() == 1);
    CHECK(dist.classes[0].count == 5);
    CHECK(dist.majority == "7");
    CHECK(dist.entropy_nats == 0.0);
  }

  SUBCASE("3-2 split") {
    std::vector<AnswerSample> samples{mk("a"), mk("b"), mk("a"), mk("b"), mk("a")};
    const auto dist = build_distribution(samples, 5);
    CHECK(dist.majority == "a");
    CHECK(dist.classes[0].count == 3);
    CHECK(dist.classes[1].count == 2);
    // oracle: direct evaluation of -sum p ln p
    const double expected = -(0.6 * std::log(0.6) + 0.4 * std::log(0.4));
    CHECK(dist.entropy_nats == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("five distinct answers hit the entropy ceiling") {
    std::vector<AnswerSample> samples{mk("a"), mk("b"), mk("c"), mk("d"), mk("e")};
    const auto dist = build_distribution(samples, 5);
    CHECK(dist.entropy_nats == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  }

  SUBCASE("majority tie breaks to the lexicographically smallest") {
    std::vector<AnswerSample> samples{mk("b"), mk("b"), mk("a"), mk("a"), mk("c")};
    const auto dist = build_distribution(samples, 5);
    CHECK(dist.majority == "a");
  }

  SUBCASE("errors") {
    std::vector<AnswerSample> none;
    CHECK_THROWS(build_distribution(none, 0));
    std::vector<AnswerSample> two{mk("a"), mk("b")};
    CHECK_THROWS(build_distribution(two, 5));
  }
}

TEST_CASE("distribution is invariant under sample permutation") {
  std::mt19937 shuffle_rng(7);
  std::vector<AnswerSample> samples;
  for (const char* c : {"x", "y", "x", "z", "x", "y"}) {
    AnswerSample s;
    s.canonical = c;
    samples.push_back(s);
  }
  const auto reference = build_distribution(samples, 6);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(samples.begin(), samples.end(), shuffle_rng);
    const auto dist = build_distribution(samples, 6);
    CHECK(dist.majority == reference.majority);
    CHECK(dist.entropy_nats == reference.entropy_nats);
    REQUIRE(dist.classes.size() == reference.classes.size());
    for (std::size_t i = 0; i < dist.classes.size(); ++i) {
      CHECK(dist.classes[i].canonical == reference.classes[i].canonical);
      CHECK(dist.classes[i].count == reference.classes[i].count);
    }
  }
}

TEST_CASE("entropy bounds: zero iff one class, ln N iff all distinct") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<AnswerSample> samples;
    const int n_classes = 1 + static_cast<int>(rng() % n);
    for (int i = 0; i < n; ++i) {
      AnswerSample s;
      s.canonical = "c" + std::to_string(i % n_classes);
      samples.push_back(s);
    }
    const auto dist = build_distribution(samples, n);
    CHECK(dist.entropy_nats >= 0.0);
    CHECK(dist.entropy_nats <= std::log(static_cast<double>(n)) + 1e-12);
    if (dist.classes.size() == 1) CHECK(dist.entropy_nats == 0.0);
    if (static_cast<int>(dist.classes.size()) == n)
      CHECK(dist.entropy_nats == doctest::Approx(std::log(double(n))).epsilon(1e-12));
  }
}

TEST_CASE("probability_of and entropy conversion") {
  std::vector<AnswerSample> samples;
  for (const char* c : {"a", "a", "b"}) {
    AnswerSample s;
    s.canonical = c;
    samples.push_back(s);
  }
  const auto dist = build_distribution(samples, 3);
  CHECK(*probability_of(dist, "a") == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(probability_of(dist, "zzz"));
  CHECK(convert_entropy(std::log(2.0), 2.0) == doctest::Approx(1.0));
}
