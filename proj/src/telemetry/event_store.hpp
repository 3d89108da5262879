// Copyright 2026 The Learnprof Authors
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

#ifndef LEARNPROF_TELEMETRY_EVENT_STORE_HPP
#define LEARNPROF_TELEMETRY_EVENT_STORE_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace learnprof::telemetry {

enum class EventKind { kAnswers, kBugReport };

const char* kind_name(EventKind kind);
std::optional<EventKind> kind_from_name(std::string_view name);

struct StoredEvent {
  std::int64_t event_id = 0;
  std::int64_t received_at_ms = 0;
  EventKind kind = EventKind::kAnswers;
  std::string body;  // payload JSON, verbatim

  // One NDJSON line without the trailing newline.
  std::string to_ndjson() const;
};

struct ExportFilter {
  std::optional<EventKind> kind;
  std::optional<std::int64_t> from_ms;  // inclusive
  std::optional<std::int64_t> to_ms;    // exclusive
  bool matches(const StoredEvent& e) const;
};

// Append-only event log. Writes are serialized through one appender so ids
// are gap-free and ordered; readers see a consistent prefix. With a backing
// file every append is fsync'ed before it becomes visible.
class EventStore {
 public:
  using Clock = std::function<std::int64_t()>;

  // In-memory store.
  explicit EventStore(Clock clock = {});
  // File-backed store; existing events in `path` are replayed.
  explicit EventStore(const std::filesystem::path& path, Clock clock = {});
  ~EventStore();

  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  // Bodies containing raw line breaks are stored compacted so every event
  // stays on one line. Throws Error(kIo) if the write fails; the store is
  // left unchanged in that case.
  StoredEvent append(EventKind kind, std::string body);

  std::vector<StoredEvent> snapshot(const ExportFilter& filter = {}) const;
  std::string export_ndjson(const ExportFilter& filter = {}) const;
  std::size_t size() const;

  // Parses one exported line back into an event.
  static StoredEvent parse_line(std::string_view line);

 private:
  void replay();

  Clock clock_;
  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex append_mu_;
  mutable std::shared_mutex read_mu_;
  std::vector<StoredEvent> events_;
};

}  // namespace learnprof::telemetry

#endif  // LEARNPROF_TELEMETRY_EVENT_STORE_HPP
