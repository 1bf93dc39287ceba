#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "parmine/error.hpp"
#include "parmine/vector_file.hpp"
#include "test_util.hpp"

namespace parmine {
namespace {

std::string error_of(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    read_matrix(in);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

std::string header(std::uint32_t dim, std::uint64_t count) {
  std::string h = "MVEC";
  for (int i = 0; i < 4; ++i) h.push_back(static_cast<char>((dim >> (8 * i)) & 0xFF));
  for (int i = 0; i < 8; ++i) h.push_back(static_cast<char>((count >> (8 * i)) & 0xFF));
  return h;
}

TEST(Mvec, LayoutOfTwoByThree) {
  EmbeddingMatrix m(2, 3, {1.0f, -2.5f, 0.0f, 3.25f, 1e-8f, -0.0f});
  std::ostringstream out;
  write_matrix(out, m);
  const std::string bytes = out.str();
  EXPECT_EQ(bytes.size(), 4u + 4u + 8u + 24u);
  EXPECT_EQ(bytes.substr(0, 16), header(3, 2));
  float first;
  std::memcpy(&first, bytes.data() + 16, 4);
  EXPECT_EQ(first, 1.0f);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + 3]), 0x3F);  // 1.0f little-endian
}

TEST(Mvec, RoundTripIsBitExact) {
  const auto dir = testing::scratch_dir("mvec");
  for (std::size_t dim : {1u, 3u, 256u}) {
    auto m = testing::random_unit_matrix(17, dim, dim);
    m.row(0)[0] = -0.0f;
    const auto path = (dir / ("m" + std::to_string(dim) + ".mvec")).string();
    store_matrix(m, path);
    const auto back = load_matrix(path);
    ASSERT_EQ(back.count(), m.count());
    ASSERT_EQ(back.dim(), m.dim());
    EXPECT_EQ(std::memcmp(back.values().data(), m.values().data(), m.values().size() * 4), 0);
    std::ostringstream again;
    write_matrix(again, back);
    EXPECT_EQ(again.str(), testing::read_file(path));
  }
}

TEST(Mvec, EmptyMatrix) {
  std::stringstream ss;
  write_matrix(ss, EmbeddingMatrix(0, 5));
  const auto m = read_matrix(ss);
  EXPECT_EQ(m.count(), 0u);
  EXPECT_EQ(m.dim(), 5u);
}

TEST(Mvec, ErrorsNameTheField) {
  const std::string payload(8, '\0');
  EXPECT_EQ(error_of("MVEX" + header(1, 2).substr(4) + payload), "bad magic");
  EXPECT_EQ(error_of("MV"), "bad magic");
  EXPECT_EQ(error_of("MVEC\x01\x00"), "truncated header: dim");
  EXPECT_EQ(error_of(header(1, 2).substr(0, 12)), "truncated header: count");
  EXPECT_NE(error_of(header(1, 3) + payload).find("truncated payload"), std::string::npos);
  EXPECT_NE(error_of(header(1, 1) + payload).find("trailing bytes"), std::string::npos);
  EXPECT_NE(error_of(header(0, 0)).find("dim"), std::string::npos);
  EXPECT_NE(error_of(header(1u << 30, 1ull << 40)).find("count"), std::string::npos);
}

TEST(Mvec, SidecarIds) {
  EXPECT_EQ(sidecar_path("a/b.mvec"), "a/b.ids");
  EXPECT_EQ(sidecar_path("a/b.bin"), "a/b.bin.ids");
  const auto dir = testing::scratch_dir("ids");
  const auto path = (dir / "x.mvec").string();
  store_matrix(EmbeddingMatrix(2, 1, {1, 2}), path);
  store_ids({"p#0", "p#1"}, sidecar_path(path));
  std::vector<std::string> ids;
  const auto m = load_matrix_with_ids(path, sidecar_path(path), ids);
  EXPECT_EQ(ids, (std::vector<std::string>{"p#0", "p#1"}));
  store_ids({"p#0"}, sidecar_path(path));
  try {
    load_matrix_with_ids(path, sidecar_path(path), ids);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("count mismatch"), std::string::npos);
  }
  EXPECT_THROW(store_ids({"a\nb"}, sidecar_path(path)), DataError);
}

}  // namespace
}  // namespace parmine
