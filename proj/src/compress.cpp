#include <zlib.h>

#include "byte_io.hpp"

namespace odc::detail {

std::vector<std::uint8_t> deflate_bytes(std::span<const std::uint8_t> in, int level) {
  uLongf out_len = compressBound(static_cast<uLong>(in.size()));
  std::vector<std::uint8_t> out(out_len);
  const int rc = compress2(out.data(), &out_len, in.data(), static_cast<uLong>(in.size()), level);
  if (rc != Z_OK) throw IoError("zlib compression failed");
  out.resize(out_len);
  return out;
}

std::vector<std::uint8_t> inflate_bytes(std::span<const std::uint8_t> in,
                                        std::size_t expected_size) {
  std::vector<std::uint8_t> out(expected_size);
  uLongf out_len = static_cast<uLongf>(expected_size);
  const int rc = uncompress(out.data(), &out_len, in.data(), static_cast<uLong>(in.size()));
  if (rc != Z_OK || out_len != expected_size) throw IoError("corrupt compressed block");
  return out;
}

}  // namespace odc::detail
