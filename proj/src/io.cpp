#include "wavemap/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "container formats are little-endian; big-endian hosts need byte swaps");

namespace wavemap {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

const std::array<std::uint32_t, 256>& crc_table() {
  static const auto table = make_crc_table();
  return table;
}

}  // namespace

std::uint32_t crc32(std::span<const unsigned char> data, std::uint32_t seed) {
  const auto& table = crc_table();
  std::uint32_t c = seed ^ 0xFFFFFFFFu;
  for (unsigned char b : data) c = table[(c ^ b) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

std::uint32_t crc32_file(const std::string& path) {
  const std::vector<unsigned char> bytes = read_file_bytes(path);
  return crc32(bytes);
}

void write_file_bytes(const std::string& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw std::runtime_error("read failed: " + path);
  return bytes;
}

ContainerWriter::ContainerWriter(const std::string& magic, const nlohmann::json& metadata) {
  if (magic.size() != 4) throw std::invalid_argument("container magic must be 4 bytes");
  append(magic.data(), 4);
  const std::uint32_t version = kContainerVersion;
  append(&version, sizeof version);
  const std::string meta = metadata.dump();
  const std::uint64_t len = meta.size();
  append(&len, sizeof len);
  append(meta.data(), meta.size());
}

void ContainerWriter::append(const void* p, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  bytes_.insert(bytes_.end(), b, b + n);
}

void ContainerWriter::write_u64(std::uint64_t v) { append(&v, sizeof v); }

void ContainerWriter::write_f64_array(std::span<const double> data) {
  append(data.data(), data.size() * sizeof(double));
}

void ContainerWriter::write_matrix(std::span<const double> data, std::uint64_t rows,
                                   std::uint64_t cols) {
  if (data.size() != rows * cols)
    throw std::invalid_argument("container: matrix data does not match dimensions");
  write_u64(rows);
  write_u64(cols);
  write_f64_array(data);
}

std::vector<unsigned char> ContainerWriter::finish() {
  if (finished_) throw std::logic_error("container already finished");
  finished_ = true;
  const std::uint32_t crc = crc32(bytes_);
  append(&crc, sizeof crc);
  return std::move(bytes_);
}

void ContainerWriter::finish_to_file(const std::string& path) {
  const std::vector<unsigned char> bytes = finish();
  write_file_bytes(path, bytes);
}

ContainerReader::ContainerReader(const std::string& path, const std::string& magic)
    : bytes_(read_file_bytes(path)) {
  init(magic);
}

ContainerReader::ContainerReader(std::vector<unsigned char> bytes, const std::string& magic)
    : bytes_(std::move(bytes)) {
  init(magic);
}

void ContainerReader::init(const std::string& magic) {
  if (bytes_.size() < 4 + sizeof(std::uint32_t) + sizeof(std::uint64_t) + sizeof(std::uint32_t))
    throw IoError(io_errc::truncated, "container: file too short");
  payload_end_ = bytes_.size() - sizeof(std::uint32_t);
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, bytes_.data() + payload_end_, sizeof stored_crc);
  const std::uint32_t actual =
      crc32(std::span<const unsigned char>(bytes_.data(), payload_end_));
  if (stored_crc != actual)
    throw IoError(io_errc::crc_mismatch, "container: CRC-32 trailer mismatch");

  if (std::memcmp(bytes_.data(), magic.data(), 4) != 0)
    throw IoError(io_errc::bad_magic,
                  "container: bad magic, expected " + magic);
  pos_ = 4;
  std::uint32_t version;
  std::memcpy(&version, take(sizeof version), sizeof version);
  if (version != kContainerVersion)
    throw IoError(io_errc::bad_version,
                  "container: unsupported format version " + std::to_string(version));
  std::uint64_t meta_len;
  std::memcpy(&meta_len, take(sizeof meta_len), sizeof meta_len);
  const unsigned char* meta = take(meta_len);
  try {
    metadata_ = nlohmann::json::parse(meta, meta + meta_len);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(io_errc::bad_metadata, std::string("container: bad metadata: ") + e.what());
  }
}

const unsigned char* ContainerReader::take(std::size_t n) {
  if (pos_ + n > payload_end_)
    throw IoError(io_errc::truncated, "container: truncated payload");
  const unsigned char* p = bytes_.data() + pos_;
  pos_ += n;
  return p;
}

std::uint64_t ContainerReader::read_u64() {
  std::uint64_t v;
  std::memcpy(&v, take(sizeof v), sizeof v);
  return v;
}

std::vector<double> ContainerReader::read_f64_array(std::uint64_t count) {
  const unsigned char* p = take(count * sizeof(double));
  std::vector<double> out(count);
  std::memcpy(out.data(), p, count * sizeof(double));
  return out;
}

std::vector<double> ContainerReader::read_matrix(std::uint64_t& rows, std::uint64_t& cols) {
  rows = read_u64();
  cols = read_u64();
  if (rows > (1ull << 32) || cols > (1ull << 32) ||
      (rows != 0 && cols != 0 && rows * cols * sizeof(double) > payload_end_ - pos_))
    throw IoError(io_errc::dim_mismatch, "container: matrix dimensions exceed payload");
  return read_f64_array(rows * cols);
}

void ContainerReader::expect_consumed() const {
  if (pos_ != payload_end_)
    throw IoError(io_errc::dim_mismatch, "container: trailing unread payload bytes");
}

}  // namespace wavemap
