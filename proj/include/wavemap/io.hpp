#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace wavemap {

enum class io_errc {
  bad_magic = 1,
  bad_version,
  truncated,
  dim_mismatch,
  crc_mismatch,
  bad_metadata,
};

struct IoError : std::runtime_error {
  IoError(io_errc c, const std::string& what) : std::runtime_error(what), code(c) {}
  io_errc code;
};

/// CRC-32 (IEEE, reflected polynomial 0xEDB88320).
std::uint32_t crc32(std::span<const unsigned char> data, std::uint32_t seed = 0);
std::uint32_t crc32_file(const std::string& path);

/// Containers share one discipline:
///   magic(4) | version u32 LE | metadata length u64 LE | UTF-8 JSON |
///   payload  | crc32 u32 LE over all preceding bytes.
/// Payload arrays are IEEE-754 little-endian f64 with explicit u64 dimension
/// prefixes written through the typed helpers below.
inline constexpr std::uint32_t kContainerVersion = 1;

class ContainerWriter {
 public:
  ContainerWriter(const std::string& magic, const nlohmann::json& metadata);
  void write_u64(std::uint64_t v);
  void write_f64_array(std::span<const double> data);
  /// rows x cols row-major matrix with both dimensions prefixed.
  void write_matrix(std::span<const double> data, std::uint64_t rows, std::uint64_t cols);
  /// Appends the CRC trailer and returns the file bytes.
  std::vector<unsigned char> finish();
  void finish_to_file(const std::string& path);

 private:
  void append(const void* p, std::size_t n);
  std::vector<unsigned char> bytes_;
  bool finished_ = false;
};

class ContainerReader {
 public:
  /// Loads the whole file, verifies magic, version, and the CRC trailer.
  ContainerReader(const std::string& path, const std::string& magic);
  ContainerReader(std::vector<unsigned char> bytes, const std::string& magic);

  const nlohmann::json& metadata() const { return metadata_; }
  std::uint64_t read_u64();
  std::vector<double> read_f64_array(std::uint64_t count);
  /// Reads the dimension prefixes, validates against limits, returns data.
  std::vector<double> read_matrix(std::uint64_t& rows, std::uint64_t& cols);
  void expect_consumed() const;

 private:
  void init(const std::string& magic);
  const unsigned char* take(std::size_t n);
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
  std::size_t payload_end_ = 0;
  nlohmann::json metadata_;
};

void write_file_bytes(const std::string& path, std::span<const unsigned char> bytes);
std::vector<unsigned char> read_file_bytes(const std::string& path);

}  // namespace wavemap
