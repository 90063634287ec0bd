// src/service/store.cpp

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

#include "voxeval/service/store.hpp"

#include <fstream>

#include <fmt/format.h>

#include "voxeval/text.hpp"

namespace voxeval::service {

namespace fs = std::filesystem;

SubmissionStore::SubmissionStore(fs::path dir) : dir_(std::move(dir)), log_path_(dir_ / "log.jsonl") {
  std::error_code ec;
  fs::create_directories(dir_ / "payloads", ec);
  if (ec) throw Error(fmt::format("cannot create data directory {}: {}", dir_.string(), ec.message()));
}

void SubmissionStore::append(const nlohmann::json& event) {
  std::lock_guard lock(mutex_);
  std::ofstream out(log_path_, std::ios::app | std::ios::binary);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw Error("cannot append to " + log_path_.string());
}

std::vector<nlohmann::json> SubmissionStore::read_log() const {
  std::lock_guard lock(mutex_);
  std::vector<nlohmann::json> events;
  if (!fs::exists(log_path_)) return events;
  const std::string text = read_text_file(log_path_);
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    try {
      events.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw IntegrityError(fmt::format("{}:{}: corrupt log entry: {}", log_path_.string(), line_no, e.what()));
    }
  });
  return events;
}

std::string SubmissionStore::put_payload(std::string_view bytes) {
  const std::string digest = sha256_hex(bytes);
  std::lock_guard lock(mutex_);
  const fs::path path = dir_ / "payloads" / digest;
  if (!fs::exists(path)) {
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw Error("cannot write payload " + tmp.string());
    }
    fs::rename(tmp, path);
  }
  return digest;
}

std::string SubmissionStore::get_payload(const std::string& digest) const {
  const fs::path path = dir_ / "payloads" / digest;
  std::string bytes;
  try {
    bytes = read_text_file(path);
  } catch (const Error&) {
    throw IntegrityError(fmt::format("payload {} is missing", digest));
  }
  if (sha256_hex(bytes) != digest) throw IntegrityError(fmt::format("payload {} is corrupt", digest));
  return bytes;
}

}  // namespace voxeval::service
