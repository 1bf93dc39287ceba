#include "parmine/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "parmine/error.hpp"
#include "parmine/utf8.hpp"
#include "parmine/vector_file.hpp"

namespace parmine {

EmbeddingMatrix::EmbeddingMatrix(std::size_t count, std::size_t dim)
    : count_(count), dim_(dim), values_(count * dim, 0.0f) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t count, std::size_t dim, std::vector<float> values)
    : count_(count), dim_(dim), values_(std::move(values)) {
  if (values_.size() != count_ * dim_) {
    throw DataError("matrix payload has " + std::to_string(values_.size()) + " values, expected " +
                    std::to_string(count_ * dim_));
  }
}

void EmbeddingMatrix::append(const EmbeddingMatrix& other) {
  if (other.empty()) return;
  if (empty() && dim_ == 0) dim_ = other.dim_;
  if (other.dim_ != dim_) {
    throw DataError("dimension mismatch: " + std::to_string(dim_) + " vs " +
                    std::to_string(other.dim_));
  }
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
  count_ += other.count_;
}

void EmbeddingMatrix::validate(bool require_normalized, double tolerance) const {
  for (std::size_t i = 0; i < count_; ++i) {
    const auto r = row(i);
    for (float v : r) {
      if (!std::isfinite(v)) throw DataError("row " + std::to_string(i) + " has NaN/Inf");
    }
    if (require_normalized) {
      const double n = l2_norm(r);
      if (std::abs(n - 1.0) > tolerance) {
        throw DataError("row " + std::to_string(i) + " is not unit-normalized (norm " +
                        std::to_string(n) + ")");
      }
    }
  }
}

double l2_norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw DataError("cosine: dimension mismatch " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw DataError("cosine: zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

void normalize(std::span<float> v) {
  const double n = l2_norm(v);
  if (n == 0.0) throw DataError("cannot normalize a zero vector");
  for (float& x : v) x = static_cast<float>(static_cast<double>(x) / n);
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "mock") return ProviderKind::Mock;
  if (name == "file") return ProviderKind::File;
  if (name == "remote") return ProviderKind::Remote;
  throw ConfigError("unknown provider kind \"" + std::string(name) + "\" (expected mock|file|remote)");
}

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::Mock: return "mock";
    case ProviderKind::File: return "file";
    case ProviderKind::Remote: return "remote";
  }
  return "?";
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config) {
  switch (config.kind) {
    case ProviderKind::Mock:
      if (config.dim == 0) throw ConfigError("provider.dim must be >= 1");
      return std::make_unique<MockProvider>(config.dim, config.normalize);
    case ProviderKind::File:
      if (config.location.empty()) throw ConfigError("provider.location is required for kind=file");
      return std::make_unique<FileProvider>(config.location, config.normalize);
    case ProviderKind::Remote:
      if (config.location.empty()) throw ConfigError("provider.location is required for kind=remote");
      return std::make_unique<RemoteProvider>(config);
  }
  throw ConfigError("unknown provider kind");
}

EmbeddingMatrix embed_texts(const EmbeddingProvider& provider, std::size_t batch_size,
                            std::span<const std::string> texts) {
  if (batch_size == 0) throw ConfigError("provider.batch_size must be >= 1");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) throw DataError("cannot embed empty text at position " + std::to_string(i));
  }
  EmbeddingMatrix out;
  for (std::size_t begin = 0; begin < texts.size(); begin += batch_size) {
    const std::size_t n = std::min(batch_size, texts.size() - begin);
    EmbeddingMatrix batch = provider.embed_batch(texts.subspan(begin, n));
    if (batch.count() != n) {
      throw ProviderError("provider returned " + std::to_string(batch.count()) + " rows for " +
                              std::to_string(n) + " texts",
                          false);
    }
    if (!out.empty() && batch.dim() != out.dim()) {
      throw DataError("dimension mismatch across batches: " + std::to_string(out.dim()) + " vs " +
                      std::to_string(batch.dim()));
    }
    out.append(batch);
  }
  return out;
}

EmbeddingMatrix embed_texts(const ProviderConfig& config, std::span<const std::string> texts) {
  const auto provider = make_provider(config);
  return embed_texts(*provider, config.batch_size, texts);
}

// ---------------------------------------------------------------------------

MockProvider::MockProvider(std::size_t dim, bool normalize) : dim_(dim), normalize_(normalize) {
  if (dim_ == 0) throw ConfigError("mock provider dim must be >= 1");
}

std::uint64_t MockProvider::hash_gram(std::string_view utf8_gram) {
  std::uint64_t h = kFnvOffsetBasis ^ kMockHashSeed;
  for (char c : utf8_gram) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

void MockProvider::embed_one(std::string_view text, std::span<float> out) const {
  if (text.empty()) throw DataError("cannot embed empty text");
  std::u32string cps = U" ";
  cps += utf8::decode(text);
  cps.push_back(U' ');
  std::vector<double> counts(dim_, 0.0);
  std::string gram;
  for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
    gram.clear();
    for (std::size_t k = 0; k < 3; ++k) utf8::append(gram, cps[i + k]);
    counts[hash_gram(gram) % dim_] += 1.0;
  }
  double norm = 1.0;
  if (normalize_) {
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    norm = std::sqrt(sq);
  }
  for (std::size_t j = 0; j < dim_; ++j) out[j] = static_cast<float>(counts[j] / norm);
}

EmbeddingMatrix MockProvider::embed_batch(std::span<const std::string> texts) const {
  EmbeddingMatrix m(texts.size(), dim_);
  for (std::size_t i = 0; i < texts.size(); ++i) embed_one(texts[i], m.row(i));
  return m;
}

// ---------------------------------------------------------------------------

FileProvider::FileProvider(const std::string& mvec_path, bool normalize) : normalize_(normalize) {
  std::vector<std::string> texts;
  matrix_ = load_matrix_with_ids(mvec_path, sidecar_path(mvec_path), texts);
  index_.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) index_.emplace_back(std::move(texts[i]), i);
  std::stable_sort(index_.begin(), index_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
}

EmbeddingMatrix FileProvider::embed_batch(std::span<const std::string> texts) const {
  EmbeddingMatrix m(texts.size(), matrix_.dim());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto it = std::lower_bound(
        index_.begin(), index_.end(), texts[i],
        [](const auto& entry, const std::string& key) { return entry.first < key; });
    if (it == index_.end() || it->first != texts[i]) {
      throw DataError("text not found in embedding file: \"" + texts[i].substr(0, 60) + "\"");
    }
    const auto src = matrix_.row(it->second);
    std::copy(src.begin(), src.end(), m.row(i).begin());
    if (normalize_) normalize(m.row(i));
  }
  return m;
}

}  // namespace parmine
