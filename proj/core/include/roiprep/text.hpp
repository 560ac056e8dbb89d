#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace roiprep {

struct QuestionText {
  std::string raw;
};

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offset into the source string
  std::size_t end = 0;    // one past the last byte

  friend bool operator==(const Token&, const Token&) = default;
};

/// Lowercase keywords in rank order, no duplicates.
struct KeywordSet {
  std::vector<std::string> keywords;

  bool empty() const noexcept { return keywords.empty(); }
  bool contains(std::string_view lowered) const;
};

/// Term weights loaded from "term<TAB>weight" lines.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::map<std::string, double> entries);

  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::string& path);

  const double* find(std::string_view lowered) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, double, std::less<>> entries_;
};

std::string to_lower_ascii(std::string_view s);

/// Whitespace split, then leading/trailing ASCII punctuation stripped per token.
std::vector<Token> tokenize(std::string_view text);

KeywordSet extract_keywords(const QuestionText& text, const Lexicon& lexicon, std::size_t top_k);

/// Removes every token matching a keyword (case-insensitive), rejoining the
/// survivors with single spaces in their original order and casing.
QuestionText derive_background_text(const QuestionText& text, const KeywordSet& keywords);

class KeywordExtractor {
 public:
  virtual ~KeywordExtractor() = default;
  virtual KeywordSet extract(const QuestionText& text) const = 0;
  virtual std::string describe() const = 0;
};

class LexiconKeywordExtractor final : public KeywordExtractor {
 public:
  LexiconKeywordExtractor(Lexicon lexicon, std::size_t top_k);
  KeywordSet extract(const QuestionText& text) const override;
  std::string describe() const override;

 private:
  Lexicon lexicon_;
  std::size_t top_k_;
};

/// Keywords supplied by the caller. Entries that are not tokens of the
/// question are dropped so the result stays a subset of its tokens.
class FixedKeywordExtractor final : public KeywordExtractor {
 public:
  explicit FixedKeywordExtractor(std::vector<std::string> keywords);
  static FixedKeywordExtractor from_csv(std::string_view csv);

  KeywordSet extract(const QuestionText& text) const override;
  std::string describe() const override;

 private:
  std::vector<std::string> keywords_;
};

}  // namespace roiprep
