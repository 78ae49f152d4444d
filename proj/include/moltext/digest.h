//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_DIGEST_H_
#define MOLTEXT_DIGEST_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace moltext {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path &path);

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view bytes);

}  // namespace moltext

#endif  // MOLTEXT_DIGEST_H_
