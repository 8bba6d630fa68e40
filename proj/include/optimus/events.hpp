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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optimus {

/// One line of the session log. Serialized as JSON Lines with keys always
/// emitted in the order t, event, node, outcome, detail — golden-log tests
/// rely on byte-stable output.
struct Event {
  double t = 0.0;
  std::string event;    // check_state | check_data | calibrate |
                        // diagnose_enter | diagnose_exit | param_update | error
  std::string node;
  std::string outcome;
  std::string detail;

  std::string to_json_line() const;
};

class EventLog {
 public:
  void emit(Event e) { events_.push_back(std::move(e)); }
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  void write_jsonl(std::ostream& out) const;

 private:
  std::vector<Event> events_;
};

}  // namespace optimus
