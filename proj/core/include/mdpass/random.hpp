#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace mdpass {

/// Fills `out` from the OS-seeded CSPRNG. Throws Error(kIo) if the source fails.
void secure_random(std::span<std::uint8_t> out);

/// `byte_count` random bytes rendered as lowercase hex.
std::string secure_random_hex(std::size_t byte_count);

}  // namespace mdpass
