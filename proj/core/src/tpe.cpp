#include "roiprep/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <unordered_set>

#include "binary_io.hpp"
#include "roiprep/error.hpp"

namespace roiprep {

namespace {
constexpr char kEmbMagic[4] = {'E', 'M', 'B', '1'};
}

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DimensionError("embedding must have dim > 0");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw FormatError("non-finite embedding component at index " + std::to_string(i));
    }
  }
}

double Embedding::norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

ModalityCatalog::ModalityCatalog(std::vector<ModalityEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error("modality catalog is empty");
  std::unordered_set<std::string> labels;
  for (const auto& e : entries_) {
    if (e.embedding.dim() != entries_.front().embedding.dim()) {
      throw DimensionError("catalog embedding '" + e.label + "' has dim " +
                           std::to_string(e.embedding.dim()) + ", expected " +
                           std::to_string(entries_.front().embedding.dim()));
    }
    if (!labels.insert(e.label).second) throw ConfigError("duplicate catalog label '" + e.label + "'");
  }
}

ModalityCatalog ModalityCatalog::load_manifest(const std::string& path) {
  namespace fs = std::filesystem;
  const std::string text = detail::read_text_file(path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<ModalityEntry> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw FormatError(path + ": line " + std::to_string(line_no) + ": expected label<TAB>path");
    }
    fs::path emb_path = line.substr(tab + 1);
    if (emb_path.is_relative()) emb_path = base / emb_path;
    entries.push_back({line.substr(0, tab), read_embedding_file(emb_path.string())});
  }
  return ModalityCatalog(std::move(entries));
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("embedding dims differ: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error("cosine similarity of a zero-norm embedding");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) dot += a.values()[i] * b.values()[i];
  return dot / (na * nb);
}

ModalitySelection select_modality(const Embedding& image_emb, const ModalityCatalog& catalog) {
  if (catalog.size() == 0) throw Error("modality catalog is empty");
  ModalitySelection sel;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& entry = catalog.entries()[i];
    if (entry.embedding.norm() == 0.0) {
      throw Error("catalog embedding '" + entry.label + "' has zero norm");
    }
    const double score = cosine_similarity(image_emb, entry.embedding);
    sel.all_scores.emplace_back(entry.label, score);
    if (i == 0 || score > sel.score) {
      sel.score = score;
      sel.index = i;
      sel.label = entry.label;
    }
  }
  return sel;
}

std::string build_enhanced_prompt(const ModalitySelection& modality, const QuestionText& question,
                                  const std::vector<BoundingBox>& boxes) {
  std::string out = "Image modality: " + modality.label + ". Regions of interest: ";
  if (boxes.empty()) {
    out += "none";
  } else {
    out += std::to_string(boxes.size()) + " box(es) at ";
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const auto& b = boxes[i];
      if (i) out += ';';
      out += std::to_string(b.x) + ',' + std::to_string(b.y) + ',' + std::to_string(b.w) + ',' +
             std::to_string(b.h);
    }
  }
  out += ". Question: " + question.raw;
  return out;
}

std::vector<std::uint8_t> encode_embedding(const Embedding& emb) {
  std::vector<std::uint8_t> out;
  out.reserve(kEmbHeaderSize + 4 * emb.dim());
  out.insert(out.end(), std::begin(kEmbMagic), std::end(kEmbMagic));
  detail::put_u32(out, kEmbVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(emb.dim()));
  for (double v : emb.values()) detail::put_f32(out, static_cast<float>(v));
  return out;
}

Embedding decode_embedding(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kEmbHeaderSize) {
    throw FormatError("EMB1 truncated header: expected " + std::to_string(kEmbHeaderSize) +
                      " bytes, got " + std::to_string(bytes.size()));
  }
  if (!std::equal(std::begin(kEmbMagic), std::end(kEmbMagic), bytes.begin())) {
    throw FormatError("bad magic: not an EMB1 file");
  }
  const std::uint32_t version = detail::get_u32(bytes, 4);
  if (version != kEmbVersion) throw FormatError("unsupported EMB1 version " + std::to_string(version));
  const std::uint64_t dim = detail::get_u32(bytes, 8);
  if (dim == 0) throw FormatError("EMB1 declares dim 0");
  const std::uint64_t expected = kEmbHeaderSize + 4 * dim;
  if (bytes.size() != expected) {
    throw FormatError("EMB1 length mismatch: expected " + std::to_string(expected) +
                      " bytes, got " + std::to_string(bytes.size()));
  }
  std::vector<double> values(dim);
  for (std::size_t i = 0; i < dim; ++i) values[i] = detail::get_f32(bytes, kEmbHeaderSize + 4 * i);
  return Embedding(std::move(values));
}

Embedding read_embedding_file(const std::string& path) {
  const auto bytes = detail::read_file(path);
  try {
    return decode_embedding(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_embedding_file(const std::string& path, const Embedding& emb) {
  detail::write_file_atomic(path, encode_embedding(emb));
}

}  // namespace roiprep
