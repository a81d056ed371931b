#ifndef SMART_HASH_HPP
#define SMART_HASH_HPP

#include <string>
#include <string_view>

namespace smart {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace smart

#endif
