//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLTEXT_JSON_UTIL_H_
#define MOLTEXT_JSON_UTIL_H_

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace moltext {

// Rejects keys outside `allowed` so that misspelled config fields fail loudly.
inline void check_keys(const nlohmann::json &j, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  if (!j.is_object())
    throw std::invalid_argument(std::string(where) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (std::string_view a : allowed)
      ok = ok || it.key() == a;
    if (!ok)
      throw std::invalid_argument(std::string(where) + ": unknown key \"" +
                                  it.key() + "\"");
  }
}

template <typename T>
void read_field(const nlohmann::json &j, const char *key, T &out) {
  if (!j.contains(key))
    return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw std::invalid_argument(std::string("bad value for \"") + key + "\"");
  }
}

}  // namespace moltext

#endif  // MOLTEXT_JSON_UTIL_H_
