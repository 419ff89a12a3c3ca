#pragma once

#include "fedsim/bytes.hpp"

#include <string_view>

namespace fedsim {

/// Domain-separated BLAKE2b-256. Every hash in the system goes through one
/// of these helpers; the domain tag is hashed as a length-prefixed string so
/// distinct domains can never collide.
Digest32 hash32(std::string_view domain, std::span<const uint8_t> data);

/// 64-byte digest, used for hash-to-group and wide reduction to scalars.
std::array<uint8_t, 64> hash64(std::string_view domain, std::span<const uint8_t> data);

}  // namespace fedsim
