#include "manifest.hpp"

#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "parmine/error.hpp"

namespace parmine::cli {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 init failed");
    }
  }

  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }

  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest, &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[digest[i] >> 4]);
      out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

void Manifest::record_input(const std::filesystem::path& path) {
  digests_[path.string()] = sha256_file(path);
}

nlohmann::ordered_json Manifest::to_json(const nlohmann::json& config) const {
  nlohmann::ordered_json j;
  j["config"] = config;
  j["seeds"] = nlohmann::ordered_json::object();
  for (const auto& [name, seed] : seeds_) j["seeds"][name] = seed;
  j["input_digests"] = nlohmann::ordered_json::object();
  for (const auto& [path, digest] : digests_) j["input_digests"][path] = digest;
  j["version"] = kVersion;
  return j;
}

void Manifest::write(const std::filesystem::path& path, const nlohmann::json& config) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json(config).dump(2) << '\n';
}

}  // namespace parmine::cli
