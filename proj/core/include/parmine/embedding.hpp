#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace parmine {

/// Row-major float32 matrix; row i belongs to the i-th item id.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t count, std::size_t dim);
  EmbeddingMatrix(std::size_t count, std::size_t dim, std::vector<float> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<float> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }

  const std::vector<float>& values() const noexcept { return values_; }

  /// Appends the rows of `other`; dims must agree (DataError otherwise).
  void append(const EmbeddingMatrix& other);

  /// Throws DataError on NaN/Inf, or on a row off unit norm by more than
  /// `tolerance` when `require_normalized` is set.
  void validate(bool require_normalized, double tolerance = 1e-4) const;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

/// Inner product with double accumulation. Elements are summed into four
/// interleaved lanes that are combined as (l0 + l1) + (l2 + l3); every
/// similarity in the library goes through this function so results are
/// reproducible bit for bit.
inline double dot(std::span<const float> a, std::span<const float> b) {
  const std::size_t n = a.size();
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    l0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    l1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
    l2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
    l3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
  }
  if (i < n) l0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  if (i + 1 < n) l1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
  if (i + 2 < n) l2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
  return (l0 + l1) + (l2 + l3);
}

double l2_norm(std::span<const float> v);

/// dot(a, b) / (|a| |b|). Throws DataError on dim mismatch or a zero vector.
double cosine(std::span<const float> a, std::span<const float> b);

/// Scales `v` to unit L2 norm in place. Throws DataError on a zero vector.
void normalize(std::span<float> v);

enum class ProviderKind { Mock, File, Remote };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::Mock;
  std::size_t dim = 256;  // mock only
  /// file: MVEC path (texts in the "<path>.ids" sidecar); remote: base URL.
  std::string location;
  std::size_t batch_size = 64;
  bool normalize = true;
  int timeout_ms = 30000;
  int max_retries = 3;
};

ProviderKind parse_provider_kind(std::string_view name);
std::string_view to_string(ProviderKind kind);

/// Must be safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  /// Embeds one batch; row i embeds texts[i].
  virtual EmbeddingMatrix embed_batch(std::span<const std::string> texts) const = 0;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config);

/// Embeds `texts` in batches of `provider.batch_size`. Throws DataError on an
/// empty text or when batches disagree on dimension.
EmbeddingMatrix embed_texts(const ProviderConfig& config, std::span<const std::string> texts);
EmbeddingMatrix embed_texts(const EmbeddingProvider& provider, std::size_t batch_size,
                            std::span<const std::string> texts);

/// Deterministic hashed character-trigram embedder.
///
/// The text is padded with one U+0020 on each side and every run of three
/// consecutive Unicode scalars is hashed with 64-bit FNV-1a over its UTF-8
/// bytes, starting from the FNV offset basis XOR kMockHashSeed. The gram
/// increments bucket (hash mod dim); the count vector is then L2-normalized
/// (when requested) with a double-precision norm.
class MockProvider final : public EmbeddingProvider {
 public:
  static constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
  static constexpr std::uint64_t kMockHashSeed = 0x5bd1e9955bd1e995ULL;

  explicit MockProvider(std::size_t dim = 256, bool normalize = true);

  EmbeddingMatrix embed_batch(std::span<const std::string> texts) const override;
  void embed_one(std::string_view text, std::span<float> out) const;

  static std::uint64_t hash_gram(std::string_view utf8_gram);

 private:
  std::size_t dim_;
  bool normalize_;
};

/// Looks texts up in a precomputed matrix. The sidecar ids file holds one
/// text per line, line i naming row i.
class FileProvider final : public EmbeddingProvider {
 public:
  explicit FileProvider(const std::string& mvec_path, bool normalize);

  EmbeddingMatrix embed_batch(std::span<const std::string> texts) const override;

 private:
  EmbeddingMatrix matrix_;
  std::vector<std::pair<std::string, std::size_t>> index_;  // sorted by text
  bool normalize_;
};

/// HTTP client for the embedding sidecar (POST <base>/v1/embed).
class RemoteProvider final : public EmbeddingProvider {
 public:
  explicit RemoteProvider(ProviderConfig config);

  EmbeddingMatrix embed_batch(std::span<const std::string> texts) const override;

 private:
  ProviderConfig config_;
};

}  // namespace parmine
