#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "oracles.hpp"
#include "roiprep/error.hpp"
#include "roiprep/tpe.hpp"

using namespace roiprep;

namespace {

double hand_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

Embedding random_embedding(SplitMix64& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
  return Embedding(std::move(v));
}

Embedding scaled(const Embedding& e, double c) {
  std::vector<double> v(e.values().begin(), e.values().end());
  for (auto& x : v) x *= c;
  return Embedding(std::move(v));
}

}  // namespace

TEST(Cosine, Examples) {
  const Embedding a({0.3, -1.2, 4.0, 0.01});
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-12);
  EXPECT_EQ(cosine_similarity(Embedding({1, 0}), Embedding({0, 1})), 0.0);
  EXPECT_NEAR(cosine_similarity(Embedding({1, 2, 2}), Embedding({2, 1, 2})), 8.0 / 9.0, 1e-15);
  EXPECT_NEAR(hand_cosine({1, 2, 2}, {2, 1, 2}), 8.0 / 9.0, 1e-15);
}

TEST(Cosine, Errors) {
  EXPECT_THROW(cosine_similarity(Embedding({1, 2}), Embedding({1, 2, 3})), DimensionError);
  EXPECT_THROW(cosine_similarity(Embedding({0, 0}), Embedding({1, 2})), Error);
  EXPECT_THROW(Embedding({}), DimensionError);
  EXPECT_THROW(Embedding({NAN}), FormatError);
}

TEST(Cosine, ScaleInvariant) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_embedding(rng, 16);
    const auto b = random_embedding(rng, 16);
    const double c = rng.uniform(1e-3, 1e3);
    EXPECT_NEAR(cosine_similarity(a, scaled(b, c)), cosine_similarity(a, b), 1e-9);
  }
}

TEST(SelectModality, HandCatalog) {
  const ModalityCatalog catalog({{"CT", Embedding({0.9, 0.1, 0})},
                                 {"MRI", Embedding({0.5, 0.5, 0.5})},
                                 {"X-ray", Embedding({0, 1, 0})}});
  const Embedding image({1, 0, 0});
  const auto sel = select_modality(image, catalog);
  EXPECT_EQ(sel.label, "CT");
  EXPECT_EQ(sel.index, 0u);
  ASSERT_EQ(sel.all_scores.size(), 3u);
  EXPECT_NEAR(sel.all_scores[0].second, hand_cosine({1, 0, 0}, {0.9, 0.1, 0}), 1e-15);
  EXPECT_NEAR(sel.all_scores[1].second, hand_cosine({1, 0, 0}, {0.5, 0.5, 0.5}), 1e-15);
  EXPECT_EQ(sel.all_scores[2].second, 0.0);
  EXPECT_EQ(sel.all_scores[1].first, "MRI");
}

TEST(SelectModality, SelfMatchAndSingleEntry) {
  const Embedding image({1, 1, 0});
  const ModalityCatalog catalog(
      {{"a", Embedding({0, 0, 1})}, {"self", image}, {"b", Embedding({1, -1, 0})}});
  const auto sel = select_modality(image, catalog);
  EXPECT_EQ(sel.label, "self");
  EXPECT_NEAR(sel.score, 1.0, 1e-12);

  const ModalityCatalog one({{"only", Embedding({-1, 0, 0})}});
  EXPECT_EQ(select_modality(Embedding({1, 0, 0}), one).label, "only");
}

TEST(SelectModality, TiesGoToLowestIndex) {
  const ModalityCatalog catalog({{"first", Embedding({1, 0})}, {"second", Embedding({2, 0})}});
  EXPECT_EQ(select_modality(Embedding({1, 0}), catalog).label, "first");
}

TEST(SelectModality, Errors) {
  EXPECT_THROW(ModalityCatalog({}), Error);
  EXPECT_THROW(ModalityCatalog({{"a", Embedding({1, 0})}, {"a", Embedding({0, 1})}}), ConfigError);
  EXPECT_THROW(ModalityCatalog({{"a", Embedding({1, 0})}, {"b", Embedding({0, 1, 0})}}),
               DimensionError);
  const ModalityCatalog zero({{"z", Embedding({0, 0})}});
  EXPECT_THROW(select_modality(Embedding({1, 0}), zero), Error);
}

TEST(SelectModality, WinnerInvariantUnderPositiveRescaling) {
  SplitMix64 rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ModalityEntry> entries;
    for (int i = 0; i < 5; ++i) entries.push_back({"m" + std::to_string(i), random_embedding(rng, 8)});
    const ModalityCatalog catalog(entries);
    const auto image = random_embedding(rng, 8);
    const auto base = select_modality(image, catalog);
    for (const auto& s : base.all_scores) EXPECT_GE(base.score, s.second);

    EXPECT_EQ(select_modality(scaled(image, rng.uniform(0.01, 100)), catalog).label, base.label);
    auto one_scaled = entries;
    const auto k = rng.between(0, 4);
    one_scaled[k].embedding = scaled(entries[k].embedding, rng.uniform(0.01, 100));
    EXPECT_EQ(select_modality(image, ModalityCatalog(one_scaled)).label, base.label);
    auto all_scaled = entries;
    const double c = rng.uniform(0.01, 100);
    for (auto& e : all_scaled) e.embedding = scaled(e.embedding, c);
    EXPECT_EQ(select_modality(scaled(image, c), ModalityCatalog(all_scaled)).label, base.label);
  }
}

TEST(EnhancedPrompt, Template) {
  ModalitySelection sel;
  sel.label = "CT";
  EXPECT_EQ(build_enhanced_prompt(sel, {"Which organ is shown?"}, {}),
            "Image modality: CT. Regions of interest: none. Question: Which organ is shown?");
  EXPECT_EQ(build_enhanced_prompt(sel, {"Q?"}, {{2, 3, 4, 5}}),
            "Image modality: CT. Regions of interest: 1 box(es) at 2,3,4,5. Question: Q?");
  EXPECT_EQ(build_enhanced_prompt(sel, {"Q?"}, {{2, 3, 4, 5}, {0, 0, 1, 1}}),
            "Image modality: CT. Regions of interest: 2 box(es) at 2,3,4,5;0,0,1,1. Question: Q?");
}

TEST(Emb1, LayoutAndRoundTrip) {
  const auto bytes = encode_embedding(Embedding({1, 2, 3}));
  EXPECT_EQ(bytes.size(), 12u + 12u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "EMB1");
  EXPECT_EQ(bytes[8], 3);

  SplitMix64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = random_embedding(rng, rng.between(1, 64));
    const auto enc = encode_embedding(e);
    EXPECT_EQ(decode_embedding(enc), e);
    EXPECT_EQ(encode_embedding(decode_embedding(enc)), enc);
  }
}

TEST(Emb1, DecodeErrors) {
  const auto smap = encode_smap(SaliencyMap(1, 1, {0.5}));
  EXPECT_THROW(decode_embedding(smap), FormatError);
  auto bytes = encode_embedding(Embedding({1, 2, 3}));
  bytes.pop_back();
  EXPECT_THROW(decode_embedding(bytes), FormatError);
  EXPECT_THROW(decode_embedding(std::vector<std::uint8_t>{'E', 'M'}), FormatError);
}

TEST(Catalog, LoadsManifestRelativeToItsDirectory) {
  const auto dir = oracle::temp_dir("manifest");
  std::filesystem::create_directories(dir / "emb");
  write_embedding_file((dir / "emb" / "ct.emb").string(), Embedding({1, 0}));
  write_embedding_file((dir / "mri.emb").string(), Embedding({0, 1}));
  {
    std::ofstream out(dir / "catalog.tsv");
    out << "# label\tpath\nCT\temb/ct.emb\n\nMRI\t" << (dir / "mri.emb").string() << "\n";
  }
  const auto catalog = ModalityCatalog::load_manifest((dir / "catalog.tsv").string());
  ASSERT_EQ(catalog.size(), 2u);
  EXPECT_EQ(catalog.entries()[0].label, "CT");
  EXPECT_EQ(catalog.entries()[1].embedding, Embedding({0, 1}));

  {
    std::ofstream out(dir / "bad.tsv");
    out << "CT emb/ct.emb\n";
  }
  EXPECT_THROW(ModalityCatalog::load_manifest((dir / "bad.tsv").string()), FormatError);
  {
    std::ofstream out(dir / "empty.tsv");
    out << "# nothing\n";
  }
  EXPECT_THROW(ModalityCatalog::load_manifest((dir / "empty.tsv").string()), Error);
}
