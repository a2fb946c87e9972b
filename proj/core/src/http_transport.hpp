// Copyright 2026 The leckg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LECKG_SRC_HTTP_TRANSPORT_HPP_
#define LECKG_SRC_HTTP_TRANSPORT_HPP_

#include <chrono>
#include <map>
#include <string>

namespace leckg::internal {

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body to an absolute http(s) URL. Throws Error{kTransport} when
/// no response arrives; HTTP status codes are returned, not thrown.
HttpResponse post_json(const std::string& url, const std::map<std::string, std::string>& headers,
                       const std::string& body, std::chrono::milliseconds timeout);

}  // namespace leckg::internal

#endif  // LECKG_SRC_HTTP_TRANSPORT_HPP_
