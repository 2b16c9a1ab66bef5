// event_log.hpp
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

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace zreval {

// Run-scoped warning collector. Events are keyed by a stable identifier;
// the first message per key is kept and later hits only bump the count, so
// a run emits one line per condition no matter how often it fires. Thread
// safe; entries() is key-sorted so report content does not depend on worker
// scheduling.
class EventLog {
 public:
  struct Entry {
    std::string key;
    std::string message;
    std::uint64_t count = 0;
  };

  void warn(const std::string& key, const std::string& message) {
    std::lock_guard<std::mutex> lock(mu_);
    Entry& e = entries_[key];
    if (e.count == 0) {
      e.key = key;
      e.message = message;
    }
    ++e.count;
  }

  bool has(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.find(key) != entries_.end();
  }

  std::vector<Entry> entries() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (const auto& [key, entry] : entries_) out.push_back(entry);
    return out;
  }

  void clear() {
    std::lock_guard<std::mutex> lock(mu_);
    entries_.clear();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
};

}  // namespace zreval
