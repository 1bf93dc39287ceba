#include "parmine/vector_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "parmine/error.hpp"

namespace parmine {
namespace {

static_assert(sizeof(float) == 4);

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xFF);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) return false;
  value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return true;
}

}  // namespace

void write_matrix(std::ostream& out, const EmbeddingMatrix& m) {
  out.write(kMvecMagic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dim()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.count()));
  for (float v : m.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
}

EmbeddingMatrix read_matrix(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMvecMagic, 4) != 0) {
    throw DataError("bad magic");
  }
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  if (!get_le(in, dim)) throw DataError("truncated header: dim");
  if (!get_le(in, count)) throw DataError("truncated header: count");
  if (dim == 0) throw DataError("dim: must be >= 1");
  // Reject impossible counts before allocating.
  const auto here = in.tellg();
  if (here != std::streampos(-1)) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    const std::uint64_t available = static_cast<std::uint64_t>(end - here);
    const std::uint64_t expected = count * dim * 4;
    if (count != 0 && expected / count / 4 != dim) throw DataError("count: header overflows");
    if (available < expected) throw DataError("truncated payload: count/dim larger than file");
    if (available > expected) throw DataError("trailing bytes: count/dim smaller than file");
  }
  std::vector<float> values(count * dim);
  std::vector<unsigned char> raw(values.size() * 4);
  if (!raw.empty() && !in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw DataError("truncated payload: count/dim larger than file");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const unsigned char* b = raw.data() + 4 * i;
    const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                               (static_cast<std::uint32_t>(b[2]) << 16) |
                               (static_cast<std::uint32_t>(b[3]) << 24);
    values[i] = std::bit_cast<float>(bits);
  }
  return EmbeddingMatrix(count, dim, std::move(values));
}

void store_matrix(const EmbeddingMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  write_matrix(out, m);
  if (!out) throw DataError("write failed: " + path);
}

EmbeddingMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  try {
    return read_matrix(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void store_ids(const std::vector<std::string>& ids, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& id : ids) {
    if (id.find_first_of("\r\n") != std::string::npos) throw DataError("id contains a newline");
    out << id << '\n';
  }
}

std::vector<std::string> load_ids(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) ids.push_back(line);
  return ids;
}

EmbeddingMatrix load_matrix_with_ids(const std::string& path, const std::string& ids_path,
                                     std::vector<std::string>& ids) {
  EmbeddingMatrix m = load_matrix(path);
  ids = load_ids(ids_path);
  if (ids.size() != m.count()) {
    throw DataError(path + ": count mismatch: matrix has " + std::to_string(m.count()) +
                    " rows, ids file has " + std::to_string(ids.size()) + " lines");
  }
  return m;
}

std::string sidecar_path(const std::string& mvec_path) {
  constexpr std::string_view ext = ".mvec";
  if (mvec_path.size() > ext.size() &&
      mvec_path.compare(mvec_path.size() - ext.size(), ext.size(), ext) == 0) {
    return mvec_path.substr(0, mvec_path.size() - ext.size()) + ".ids";
  }
  return mvec_path + ".ids";
}

}  // namespace parmine
