// include/voxeval/service/store.hpp

// Copyright 2026  The voxeval Authors

// See LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "voxeval/errors.hpp"

namespace voxeval::service {

class IntegrityError : public Error {
 public:
  using Error::Error;
};

std::string sha256_hex(std::string_view bytes);

// Durable state of the service: an append-only event log (one JSON object
// per line in log.jsonl) and a content-addressed payload directory
// (payloads/<sha256>).
class SubmissionStore {
 public:
  explicit SubmissionStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  void append(const nlohmann::json& event);
  std::vector<nlohmann::json> read_log() const;

  // Stores the bytes and returns their digest. Idempotent.
  std::string put_payload(std::string_view bytes);
  // Throws IntegrityError if the file is missing or its content no longer
  // hashes to `digest`.
  std::string get_payload(const std::string& digest) const;

 private:
  std::filesystem::path dir_;
  std::filesystem::path log_path_;
  mutable std::mutex mutex_;
};

}  // namespace voxeval::service
