#ifndef PROPSUM_HASHING_H_
#define PROPSUM_HASHING_H_

#include <string>
#include <string_view>

namespace propsum {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace propsum

#endif  // PROPSUM_HASHING_H_
