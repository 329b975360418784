#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "doconto/encoder/cae.hpp"
#include "doconto/encoder/tensor.hpp"
#include "doconto/encoder/training.hpp"
#include "doconto/encoder/vae.hpp"
#include "doconto/errors.hpp"
#include "doconto/util/numfmt.hpp"

namespace doconto {

// Bottleneck embeddings, row i belonging to labels[i].
struct EmbeddingMatrix {
  std::vector<std::string> labels;
  Tensor rows;  // n × d

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return rows.cols; }

  bool operator==(const EmbeddingMatrix&) const = default;
};

namespace detail {

template <class EmbedFn>
EmbeddingMatrix embed_with(std::span<const EncodedHeader> headers, std::span<const std::string> labels,
                           std::size_t dim, EmbedFn&& fn) {
  if (headers.size() != labels.size()) throw ParameterError("labels must align with headers");
  EmbeddingMatrix m{{labels.begin(), labels.end()}, Tensor(headers.size(), dim)};
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::vector<double> v = fn(headers[i]);
    require_finite(v, "bottleneck");
    std::copy(v.begin(), v.end(), m.rows.row(i).begin());
  }
  return m;
}

}  // namespace detail

// VAE rows are the noise-free mean z̄.
inline EmbeddingMatrix embed_headers(const VaeParameters& model, std::span<const EncodedHeader> headers,
                                     std::span<const std::string> labels) {
  return detail::embed_with(headers, labels, model.shape.latent,
                            [&](const EncodedHeader& h) { return vae_embed(model, h); });
}

inline EmbeddingMatrix embed_headers(const CaeParameters& model, std::span<const EncodedHeader> headers,
                                     std::span<const std::string> labels) {
  return detail::embed_with(headers, labels, model.shape.bottleneck_size(),
                            [&](const EncodedHeader& h) { return cae_embed(model, h); });
}

// label<TAB>v1<TAB>...<TAB>vd, shortest round-trip float text.
inline void write_embedding_tsv(std::ostream& os, const EmbeddingMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << m.labels[i];
    for (double v : m.rows.row(i)) os << '\t' << util::format_double(v);
    os << '\n';
  }
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

// Reads "label<TAB>v1..." rows; every row must have the same number of values.
inline EmbeddingMatrix read_embedding_tsv(std::istream& is) {
  EmbeddingMatrix m;
  std::vector<double> values;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2) throw DataError("embedding line " + std::to_string(line_no) + ": no values");
    if (m.labels.empty()) dim = fields.size() - 1;
    if (fields.size() - 1 != dim) throw DataError("embedding line " + std::to_string(line_no) + ": ragged row");
    m.labels.push_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) values.push_back(util::parse_double(fields[k]));
  }
  m.rows = Tensor(m.labels.size(), dim);
  m.rows.data = std::move(values);
  return m;
}

inline void write_loss_csv(std::ostream& os, std::span<const EpochLoss> history) {
  os << "epoch,train_total,val_total\n";
  for (const auto& e : history)
    os << e.epoch << ',' << util::format_double(e.train_total) << ',' << util::format_double(e.val_total) << '\n';
}

inline std::vector<EpochLoss> read_loss_csv(std::istream& is) {
  std::vector<EpochLoss> out;
  std::string line;
  if (!std::getline(is, line) || line != "epoch,train_total,val_total") throw DataError("loss CSV: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw DataError("loss CSV: expected 3 columns");
    out.push_back({static_cast<std::size_t>(util::parse_double(line.substr(0, c1))),
                   util::parse_double(line.substr(c1 + 1, c2 - c1 - 1)), util::parse_double(line.substr(c2 + 1))});
  }
  return out;
}

}  // namespace doconto
