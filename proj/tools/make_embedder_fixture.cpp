// Writes the hashing-embedder reference fixture checked by
// tests/oracle/embedder_oracle.py:
//   <out>/embeddings.json  texts, sparse quantized vectors, cosine matrix
//
//   make_embedder_fixture <out-dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <nlohmann/json.hpp>

#include "pgr/gateway/embedding.hpp"

using nlohmann::json;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_embedder_fixture <out-dir>\n";
    return 2;
  }
  std::vector<std::string> texts = {
      "User drinks oat milk lattes every morning",
      "user DRINKS oat-milk lattes, every morning!",
      "The user is saving for a flat in Porto",
      "the and of to in",
      "GPU overheating issue; user plans to reduce overheating during gaming",
      "March trip funds locked, user frames trip money as 'already spent'",
      "Finishing RDR2 before buying new games",
      "Caf\xc3\xa9 au lait in M\xc3\xbcnchen, 2026-03-05",
      "\xe6\x9d\xb1\xe4\xba\xac trip planning",
      "10k race on 2025-06-14 at 08:30",
      "a",
      "x",
      "repeat repeat repeat repeat",
      "repeat",
      "Check pre-order price and payment options; fun money capped EUR 15-20",
      "tabs\tand\nnewlines\r\nmixed   spacing",
  };
  // Word salad over a small vocabulary, so collisions and sign flips show up.
  const std::vector<std::string> vocab = {"budget", "trip", "game",   "coffee", "run",    "doctor", "piano",
                                          "cat",    "rent", "garden", "window", "winter", "train",  "Budget",
                                          "GAME",   "the",  "of",     "42",     "naïve",  "x1"};
  std::mt19937_64 rng(17);
  for (int i = 0; i < 64; ++i) {
    int n = std::uniform_int_distribution<int>(1, 9)(rng);
    std::string t;
    for (int w = 0; w < n; ++w) t += (w ? " " : "") + vocab[rng() % vocab.size()];
    texts.push_back(t);
  }

  json out;
  out["dimension"] = pgr::HashingEmbedder::kDefaultDimension;
  out["quant_bits"] = pgr::EmbeddingVector::kQuantBits;
  out["texts"] = texts;
  pgr::HashingEmbedder embedder;
  std::vector<pgr::EmbeddingVector> vecs;
  for (const auto& t : texts) vecs.push_back(embedder.embed_one(t));
  json sparse = json::array();
  for (const auto& v : vecs) {
    json row = json::array();
    for (std::size_t i = 0; i < v.dimension(); ++i) {
      if (v.values()[i] != 0.0) row.push_back(json::array({i, v.values()[i]}));
    }
    sparse.push_back(row);
  }
  out["vectors"] = sparse;
  json cos = json::array();
  for (const auto& a : vecs) {
    json row = json::array();
    for (const auto& b : vecs) row.push_back(pgr::cosine(a, b));
    cos.push_back(row);
  }
  out["cosine"] = cos;

  std::filesystem::create_directories(argv[1]);
  std::ofstream f(std::filesystem::path(argv[1]) / "embeddings.json");
  f << out.dump() << '\n';
  std::cout << "wrote " << texts.size() << " texts to " << argv[1] << '\n';
  return f ? 0 : 1;
}
