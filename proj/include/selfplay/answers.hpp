// Answer equivalence and consensus statistics: canonical answer forms, the
// <answer> tag extractor, and the empirical answer distribution with its
// consensus entropy.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selfplay {

// One solver generation after answer extraction.
struct AnswerSample {
  std::string raw_text;
  std::string canonical;          // normalized answer token, never empty
  int words_before_answer = 0;    // whitespace tokens strictly before the tag
};

// Normalizes an answer string: trim, lowercase, strip surrounding
// punctuation; numeric answers are re-serialized in a fixed form (integers
// without a decimal point, otherwise shortest round-trip decimal) so that
// "3.50" and "3.5" agree. Two answers are equivalent iff their canonicals
// are byte-equal. Returns nullopt when nothing remains after normalization.
std::optional<std::string> canonicalize_answer(std::string_view text);

// Locates the first <answer>...</answer> span (a missing closing tag runs to
// the end of text) and canonicalizes its contents. Fails when no opening tag
// is present or the span canonicalizes to nothing.
std::optional<AnswerSample> extract_answer(std::string_view generation);

struct AnswerClass {
  std::string canonical;
  int count = 0;
};

// Empirical distribution over N answer samples.
struct AnswerDistribution {
  int n_samples = 0;                  // N
  std::vector<AnswerClass> classes;   // sorted by (count desc, canonical asc)
  std::string majority;               // classes.front().canonical
  double entropy_nats = 0.0;          // consensus entropy H, natural log
};

// Counts samples by canonical answer. Ties for the majority break to the
// lexicographically smallest canonical. Throws on an empty sample list or a
// length mismatch with n_expected.
AnswerDistribution build_distribution(std::span<const AnswerSample> samples, int n_expected);

// Empirical probability of a canonical answer, nullopt when absent.
std::optional<double> probability_of(const AnswerDistribution& dist, std::string_view canonical);

// H = -sum p ln p over class counts (natural log).
double shannon_entropy_nats(std::span<const int> counts);

// Entropy rebased from nats, e.g. base 2 for bits.
double convert_entropy(double entropy_nats, double base);

}  // namespace selfplay
