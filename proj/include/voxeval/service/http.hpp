// include/voxeval/service/http.hpp

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

#include <functional>
#include <memory>
#include <string>

#include "voxeval/service/service.hpp"

namespace httplib {
class Server;
}

namespace voxeval::service {

using Clock = std::function<Timestamp()>;

Timestamp system_now();

// HTTP+JSON front end:
//   POST /tracks/{id}/submissions        (Bearer team token; multipart "payload" or raw body)
//   GET  /tracks/{id}/leaderboard?phase=challenge|permanent
//   GET  /submissions/{id}
//   POST /admin/tracks                   (Bearer admin token; TrackConfig JSON)
//   POST /admin/tracks/{id}/phase        (Bearer admin token; optional {"override": true})
class HttpFrontend {
 public:
  explicit HttpFrontend(ChallengeService& service, Clock clock = system_now);
  ~HttpFrontend();
  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  // Returns the bound port (0 on failure). Pass port 0 for any free port.
  int bind(const std::string& host, int port);
  // Blocks until stop(); in-flight requests finish before it returns.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  ChallengeService& service_;
  Clock clock_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace voxeval::service
