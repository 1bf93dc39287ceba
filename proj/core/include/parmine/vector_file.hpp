#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "parmine/embedding.hpp"

namespace parmine {

// MVEC layout, all integers and floats little-endian:
//   bytes 0..3   magic "MVEC"
//   bytes 4..7   u32 dim
//   bytes 8..15  u64 count
//   then count * dim float32, row-major

inline constexpr char kMvecMagic[4] = {'M', 'V', 'E', 'C'};
inline constexpr std::size_t kMvecHeaderSize = 16;

void write_matrix(std::ostream& out, const EmbeddingMatrix& m);
/// Throws DataError naming the field: "bad magic", "truncated header: dim",
/// "truncated header: count", "truncated payload", "trailing bytes", "dim".
EmbeddingMatrix read_matrix(std::istream& in);

void store_matrix(const EmbeddingMatrix& m, const std::string& path);
EmbeddingMatrix load_matrix(const std::string& path);

/// Sidecar ids: one id per line.
void store_ids(const std::vector<std::string>& ids, const std::string& path);
std::vector<std::string> load_ids(const std::string& path);

/// Loads a matrix together with its sidecar; the id count must equal the row
/// count ("count mismatch" otherwise).
EmbeddingMatrix load_matrix_with_ids(const std::string& path, const std::string& ids_path,
                                     std::vector<std::string>& ids);

}  // namespace parmine

namespace parmine {

/// "x.mvec" -> "x.ids"; any other path gets ".ids" appended.
std::string sidecar_path(const std::string& mvec_path);

}  // namespace parmine
