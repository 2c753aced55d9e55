// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cfraud {

/// 64-bit FNV-1a. Used for schema hashes, cache keys and data fingerprints.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  std::uint64_t digest() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view bytes) noexcept { return Fnv1a().update(bytes).digest(); }

std::string to_hex(std::uint64_t value);

/// FNV-1a digest of a file's bytes, hex encoded. Throws IoError.
std::string file_digest(const std::string& path);

}  // namespace cfraud
