#include "selfplay/answers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace selfplay {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Full-string numeric parse. from_chars rejects a leading '+', which we
// accept here ("+3" and "3" must agree).
std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::string serialize_number(double value) {
  if (value == 0.0) return "0";  // collapses -0
  // Integers print without a decimal point while exactly representable.
  if (std::trunc(value) == value && std::abs(value) < 9.007199254740992e15) {
    const auto i = static_cast<std::int64_t>(value);
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), i);
    return std::string(buf, res.ptr);
  }
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);  // shortest round-trip
  return std::string(buf, res.ptr);
}

int count_words(std::string_view s) {
  int words = 0;
  bool in_word = false;
  for (char c : s) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

}  // namespace

std::optional<std::string> canonicalize_answer(std::string_view text) {
  std::string s(trim(text));
  if (s.empty()) return std::nullopt;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  // A plain number keeps its sign; punctuation stripping would eat it.
  if (auto num = parse_number(s)) return serialize_number(*num);

  std::string_view v(s);
  while (!v.empty() && is_punct(v.front())) v.remove_prefix(1);
  while (!v.empty() && is_punct(v.back())) v.remove_suffix(1);
  v = trim(v);
  if (v.empty()) return std::nullopt;
  if (auto num = parse_number(v)) return serialize_number(*num);
  return std::string(v);
}

std::optional<AnswerSample> extract_answer(std::string_view generation) {
  static constexpr std::string_view kOpen = "<answer>";
  static constexpr std::string_view kClose = "</answer>";

  const auto open = generation.find(kOpen);
  if (open == std::string_view::npos) return std::nullopt;

  const auto body_begin = open + kOpen.size();
  const auto close = generation.find(kClose, body_begin);
  const auto body_end = close == std::string_view::npos ? generation.size() : close;

  auto canonical = canonicalize_answer(generation.substr(body_begin, body_end - body_begin));
  if (!canonical) return std::nullopt;

  AnswerSample sample;
  sample.raw_text = std::string(generation);
  sample.canonical = std::move(*canonical);
  sample.words_before_answer = count_words(generation.substr(0, open));
  return sample;
}

AnswerDistribution build_distribution(std::span<const AnswerSample> samples, int n_expected) {
  if (samples.empty()) throw std::invalid_argument("build_distribution: empty sample list");
  if (static_cast<int>(samples.size()) != n_expected)
    throw std::invalid_argument("build_distribution: sample count does not match n_expected");

  std::map<std::string, int> counts;
  for (const auto& s : samples) {
    if (s.canonical.empty())
      throw std::invalid_argument("build_distribution: sample with empty canonical");
    ++counts[s.canonical];
  }

  AnswerDistribution dist;
  dist.n_samples = n_expected;
  dist.classes.reserve(counts.size());
  for (auto& [canonical, count] : counts) dist.classes.push_back({canonical, count});
  std::sort(dist.classes.begin(), dist.classes.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.canonical < b.canonical;
  });
  dist.majority = dist.classes.front().canonical;

  std::vector<int> raw;
  raw.reserve(dist.classes.size());
  for (const auto& c : dist.classes) raw.push_back(c.count);
  dist.entropy_nats = shannon_entropy_nats(raw);
  return dist;
}

std::optional<double> probability_of(const AnswerDistribution& dist, std::string_view canonical) {
  for (const auto& c : dist.classes)
    if (c.canonical == canonical)
      return static_cast<double>(c.count) / static_cast<double>(dist.n_samples);
  return std::nullopt;
}

double shannon_entropy_nats(std::span<const int> counts) {
  double total = 0.0;
  for (int c : counts) total += c;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (int c : counts) {
    if (c <= 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

double convert_entropy(double entropy_nats, double base) {
  if (base <= 0.0 || base == 1.0) throw std::invalid_argument("convert_entropy: bad base");
  return entropy_nats / std::log(base);
}

}  // namespace selfplay
