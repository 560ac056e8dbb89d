#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roiprep/roi.hpp"
#include "roiprep/text.hpp"

namespace roiprep {

/// Encoder output vector with finite components.
class Embedding {
 public:
  explicit Embedding(std::vector<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double norm() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

struct ModalityEntry {
  std::string label;
  Embedding embedding;
};

/// Ordered, non-empty list of modality labels with text embeddings of one dim.
class ModalityCatalog {
 public:
  explicit ModalityCatalog(std::vector<ModalityEntry> entries);

  /// Reads "label<TAB>path" lines; relative paths resolve against the
  /// manifest's directory. Blank lines and '#' lines are skipped.
  static ModalityCatalog load_manifest(const std::string& path);

  const std::vector<ModalityEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t dim() const noexcept { return entries_.front().embedding.dim(); }

 private:
  std::vector<ModalityEntry> entries_;
};

struct ModalitySelection {
  std::string label;
  double score = 0.0;
  std::size_t index = 0;
  std::vector<std::pair<std::string, double>> all_scores;  // catalog order
};

/// dot(a, b) / (|a| |b|). Throws on dim mismatch or a zero-norm operand.
double cosine_similarity(const Embedding& a, const Embedding& b);

/// Cosine argmax over the catalog; ties go to the lowest index.
ModalitySelection select_modality(const Embedding& image_emb, const ModalityCatalog& catalog);

/// "Image modality: {label}. Regions of interest: {n} box(es) at x,y,w,h;... . Question: {q}"
/// or "... Regions of interest: none. ..." when there are no boxes.
std::string build_enhanced_prompt(const ModalitySelection& modality, const QuestionText& question,
                                  const std::vector<BoundingBox>& boxes);

// EMB1 codec: "EMB1", u32 version (=1), u32 dim, then dim float32 values;
// little-endian.
inline constexpr std::size_t kEmbHeaderSize = 12;
inline constexpr std::uint32_t kEmbVersion = 1;

std::vector<std::uint8_t> encode_embedding(const Embedding& emb);
Embedding decode_embedding(std::span<const std::uint8_t> bytes);

Embedding read_embedding_file(const std::string& path);
void write_embedding_file(const std::string& path, const Embedding& emb);

}  // namespace roiprep
