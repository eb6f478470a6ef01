#include "mdpass/random.hpp"

#include <openssl/rand.h>

#include <vector>

#include "mdpass/error.hpp"
#include "mdpass/hex.hpp"

namespace mdpass {

void secure_random(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error(ErrorCode::kIo, "secure random source unavailable");
  }
}

std::string secure_random_hex(std::size_t byte_count) {
  std::vector<std::uint8_t> buf(byte_count);
  secure_random(buf);
  return to_hex(buf);
}

}  // namespace mdpass
