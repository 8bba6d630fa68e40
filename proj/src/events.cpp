// Copyright 2026 The Optimus Authors.
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

#include "optimus/events.hpp"

#include <ostream>

#include "json.hpp"

namespace optimus {

std::string Event::to_json_line() const {
  nlohmann::ordered_json j;
  j["t"] = t;
  j["event"] = event;
  j["node"] = node;
  j["outcome"] = outcome;
  j["detail"] = detail;
  return j.dump();
}

void EventLog::write_jsonl(std::ostream& out) const {
  for (const Event& e : events_) out << e.to_json_line() << "\n";
}

}  // namespace optimus
