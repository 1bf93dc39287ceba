#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace parmine::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Lowercase hex SHA-256 of a file's bytes. Throws DataError if unreadable.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// Run record written next to a stage's outputs.
class Manifest {
 public:
  void record_input(const std::filesystem::path& path);
  void set_seed(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }

  nlohmann::ordered_json to_json(const nlohmann::json& config) const;
  void write(const std::filesystem::path& path, const nlohmann::json& config) const;

 private:
  std::map<std::string, std::string> digests_;
  std::map<std::string, std::uint64_t> seeds_;
};

}  // namespace parmine::cli
