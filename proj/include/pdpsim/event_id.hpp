// Copyright 2026 The pdpsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDPSIM__EVENT_ID_HPP_
#define PDPSIM__EVENT_ID_HPP_

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pdpsim
{

/// Lowercase hex SHA-256 digest.
inline std::string sha256_hex(std::string_view data)
{
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

/// Stable identity of a brake event: SHA-256 over a length-prefixed encoding
/// of (dataset, recording, ego, object, frame, level).
inline std::string make_event_id(
  std::string_view dataset, std::string_view recording_id, const int ego_id, const int object_id,
  const int frame, std::string_view level)
{
  std::string buf = "pdpsim.event.v1";
  const auto field = [&buf](std::string_view s) {
    buf += '|';
    buf += std::to_string(s.size());
    buf += ':';
    buf += s;
  };
  field(dataset);
  field(recording_id);
  field(std::to_string(ego_id));
  field(std::to_string(object_id));
  field(std::to_string(frame));
  field(level);
  return sha256_hex(buf);
}

}  // namespace pdpsim

#endif  // PDPSIM__EVENT_ID_HPP_
