#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "doconto/corpus.hpp"
#include "doconto/errors.hpp"

namespace doconto {

using TokenIndex = std::uint32_t;

inline constexpr TokenIndex kPad = 0;
inline constexpr TokenIndex kUnk = 1;

class Vocabulary {
 public:
  Vocabulary() : tokens_{"<pad>", "<unk>"} {}

  // Tokens must be listed in index order starting at index 2.
  explicit Vocabulary(std::span<const std::string> tokens) : Vocabulary() {
    for (const auto& t : tokens) add(t);
  }

  TokenIndex index_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
  }

  const std::string& token(TokenIndex i) const { return tokens_.at(i); }
  std::size_t size() const { return tokens_.size(); }

  // Tokens at indices >= 2, in index order.
  std::vector<std::string> regular_tokens() const { return {tokens_.begin() + 2, tokens_.end()}; }

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  void add(const std::string& t) {
    if (!index_.emplace(t, static_cast<TokenIndex>(tokens_.size())).second)
      throw DataError("duplicate vocabulary token '" + t + "'");
    tokens_.push_back(t);
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenIndex> index_;
};

// Keeps the (max_size - 2) most frequent tokens with count >= min_token_count,
// ties broken lexicographically.
inline Vocabulary build_vocabulary(std::span<const HeaderRecord> headers, std::size_t max_size,
                                   std::size_t min_token_count = 1) {
  if (max_size < 3) throw ParameterError("vocabulary max_size must be >= 3");
  std::map<std::string, std::size_t> counts;
  for (const auto& h : headers)
    for (const auto& t : h.tokens) ++counts[t];

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [t, n] : counts)
    if (n >= min_token_count) ranked.emplace_back(t, n);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  if (ranked.size() > max_size - 2) ranked.resize(max_size - 2);

  std::vector<std::string> kept;
  kept.reserve(ranked.size());
  for (auto& [t, n] : ranked) kept.push_back(t);
  return Vocabulary(kept);
}

struct EncodedHeader {
  std::vector<TokenIndex> indices;  // exactly L entries, PAD-filled

  bool operator==(const EncodedHeader&) const = default;
};

inline EncodedHeader encode_tokens(std::span<const std::string> tokens, const Vocabulary& v, std::size_t length) {
  if (length < 1) throw ParameterError("encoded length must be >= 1");
  EncodedHeader e{std::vector<TokenIndex>(length, kPad)};
  const std::size_t n = std::min(tokens.size(), length);
  for (std::size_t i = 0; i < n; ++i) e.indices[i] = v.index_of(tokens[i]);
  return e;
}

inline EncodedHeader encode_header(const HeaderRecord& h, const Vocabulary& v, std::size_t length) {
  return encode_tokens(h.tokens, v, length);
}

}  // namespace doconto
