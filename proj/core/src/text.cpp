#include "roiprep/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "binary_io.hpp"
#include "roiprep/error.hpp"

namespace roiprep {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool KeywordSet::contains(std::string_view lowered) const {
  return std::find(keywords.begin(), keywords.end(), lowered) != keywords.end();
}

Lexicon::Lexicon(std::map<std::string, double> entries) {
  for (auto& [term, weight] : entries) {
    if (!std::isfinite(weight) || weight <= 0.0) {
      throw ConfigError("lexicon weight for '" + term + "' must be finite and positive");
    }
    entries_.emplace(to_lower_ascii(term), weight);
  }
}

Lexicon Lexicon::parse(std::string_view text) {
  std::map<std::string, double> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw FormatError("lexicon line " + std::to_string(line_no) + ": expected term<TAB>weight");
    }
    const std::string term = to_lower_ascii(trim(line.substr(0, tab)));
    const std::string weight_text(trim(line.substr(tab + 1)));
    double weight = 0.0;
    try {
      std::size_t used = 0;
      weight = std::stod(weight_text, &used);
      if (used != weight_text.size()) throw std::invalid_argument(weight_text);
    } catch (const std::exception&) {
      throw FormatError("lexicon line " + std::to_string(line_no) + ": bad weight '" +
                        weight_text + "'");
    }
    if (term.empty() || !std::isfinite(weight) || weight <= 0.0) {
      throw FormatError("lexicon line " + std::to_string(line_no) +
                        ": term must be non-empty and weight finite and > 0");
    }
    entries[term] = weight;
  }
  return Lexicon(std::move(entries));
}

Lexicon Lexicon::load(const std::string& path) {
  try {
    return parse(detail::read_text_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

const double* Lexicon::find(std::string_view lowered) const {
  const auto it = entries_.find(lowered);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t begin = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    std::size_t end = i;
    while (begin < end && is_punct(text[begin])) ++begin;
    while (end > begin && is_punct(text[end - 1])) --end;
    if (end > begin) tokens.push_back({std::string(text.substr(begin, end - begin)), begin, end});
  }
  return tokens;
}

KeywordSet extract_keywords(const QuestionText& text, const Lexicon& lexicon, std::size_t top_k) {
  if (top_k == 0) throw ConfigError("top_k must be at least 1");

  struct Candidate {
    std::string term;
    double weight;
  };
  std::vector<Candidate> candidates;  // first-occurrence order
  std::unordered_set<std::string> seen;
  for (const auto& token : tokenize(text.raw)) {
    std::string lowered = to_lower_ascii(token.text);
    const double* weight = lexicon.find(lowered);
    if (weight && seen.insert(lowered).second) candidates.push_back({std::move(lowered), *weight});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });
  if (candidates.size() > top_k) candidates.resize(top_k);

  KeywordSet out;
  for (auto& c : candidates) out.keywords.push_back(std::move(c.term));
  return out;
}

QuestionText derive_background_text(const QuestionText& text, const KeywordSet& keywords) {
  std::string joined;
  for (const auto& token : tokenize(text.raw)) {
    if (keywords.contains(to_lower_ascii(token.text))) continue;
    if (!joined.empty()) joined += ' ';
    joined += token.text;
  }
  return {joined};
}

LexiconKeywordExtractor::LexiconKeywordExtractor(Lexicon lexicon, std::size_t top_k)
    : lexicon_(std::move(lexicon)), top_k_(top_k) {
  if (top_k_ == 0) throw ConfigError("top_k must be at least 1");
}

KeywordSet LexiconKeywordExtractor::extract(const QuestionText& text) const {
  return extract_keywords(text, lexicon_, top_k_);
}

std::string LexiconKeywordExtractor::describe() const {
  return "lexicon(" + std::to_string(lexicon_.size()) + " terms, top_k=" +
         std::to_string(top_k_) + ")";
}

FixedKeywordExtractor::FixedKeywordExtractor(std::vector<std::string> keywords) {
  for (auto& k : keywords) {
    std::string lowered = to_lower_ascii(trim(k));
    if (lowered.empty()) continue;
    if (std::find(keywords_.begin(), keywords_.end(), lowered) == keywords_.end()) {
      keywords_.push_back(std::move(lowered));
    }
  }
}

FixedKeywordExtractor FixedKeywordExtractor::from_csv(std::string_view csv) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in{std::string(csv)};
  while (std::getline(in, item, ',')) parts.push_back(item);
  return FixedKeywordExtractor(std::move(parts));
}

KeywordSet FixedKeywordExtractor::extract(const QuestionText& text) const {
  std::unordered_set<std::string> present;
  for (const auto& token : tokenize(text.raw)) present.insert(to_lower_ascii(token.text));
  KeywordSet out;
  for (const auto& k : keywords_) {
    if (present.count(k)) out.keywords.push_back(k);
  }
  return out;
}

std::string FixedKeywordExtractor::describe() const {
  return "inline(" + std::to_string(keywords_.size()) + " keywords)";
}

}  // namespace roiprep
