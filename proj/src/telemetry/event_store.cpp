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

#include "telemetry/event_store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "common/error.hpp"

namespace learnprof::telemetry {
namespace {

std::int64_t system_now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

const char* kind_name(EventKind kind) {
  return kind == EventKind::kAnswers ? "answers" : "bugReport";
}

std::optional<EventKind> kind_from_name(std::string_view name) {
  if (name == "answers") return EventKind::kAnswers;
  if (name == "bugReport") return EventKind::kBugReport;
  return std::nullopt;
}

std::string StoredEvent::to_ndjson() const {
  std::string line = "{\"eventId\":" + std::to_string(event_id) +
                     ",\"receivedAtMs\":" + std::to_string(received_at_ms) + ",\"kind\":\"" +
                     kind_name(kind) + "\",\"body\":";
  line += body;
  line += "}";
  return line;
}

bool ExportFilter::matches(const StoredEvent& e) const {
  if (kind && e.kind != *kind) return false;
  if (from_ms && e.received_at_ms < *from_ms) return false;
  if (to_ms && e.received_at_ms >= *to_ms) return false;
  return true;
}

EventStore::EventStore(Clock clock) : clock_(clock ? std::move(clock) : Clock(system_now_ms)) {}

EventStore::EventStore(const std::filesystem::path& path, Clock clock)
    : clock_(clock ? std::move(clock) : Clock(system_now_ms)), path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  replay();
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorCode::kIo, "cannot open event log " + path.string() + ": " +
                                    std::strerror(errno));
  }
}

EventStore::~EventStore() {
  if (fd_ >= 0) ::close(fd_);
}

void EventStore::replay() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      events_.push_back(parse_line(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::kIo, path_.string() + ":" + std::to_string(line_no) +
                                      ": corrupt event log: " + e.what());
    }
  }
}

StoredEvent EventStore::parse_line(std::string_view line) {
  // Lines written by this store have a fixed prefix and end with the body
  // followed by '}', which lets the body bytes be recovered exactly.
  StoredEvent e;
  try {
    const auto j = nlohmann::json::parse(line);
    e.event_id = j.at("eventId").get<std::int64_t>();
    e.received_at_ms = j.at("receivedAtMs").get<std::int64_t>();
    const auto kind = kind_from_name(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::kParse, "unknown event kind");
    e.kind = *kind;
    const std::string_view marker = ",\"body\":";
    const auto pos = line.find(marker);
    if (pos != std::string_view::npos && !line.empty() && line.back() == '}') {
      std::string_view raw = line.substr(pos + marker.size());
      raw.remove_suffix(1);
      e.body = std::string(raw);
      if (nlohmann::json::parse(e.body, nullptr, false).is_discarded()) {
        e.body = j.at("body").dump();
      }
    } else {
      e.body = j.at("body").dump();
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kParse, std::string("bad event line: ") + ex.what());
  }
  return e;
}

StoredEvent EventStore::append(EventKind kind, std::string body) {
  if (body.find_first_of("\r\n") != std::string::npos) {
    body = nlohmann::json::parse(body).dump();
  }
  std::lock_guard<std::mutex> lock(append_mu_);
  StoredEvent e;
  {
    std::shared_lock<std::shared_mutex> r(read_mu_);
    e.event_id = events_.empty() ? 1 : events_.back().event_id + 1;
  }
  e.received_at_ms = clock_();
  e.kind = kind;
  e.body = std::move(body);
  if (fd_ >= 0) {
    const off_t before = ::lseek(fd_, 0, SEEK_END);
    const std::string line = e.to_ndjson() + "\n";
    if (!write_all(fd_, line) || ::fsync(fd_) != 0) {
      const int err = errno;
      if (before >= 0) {
        [[maybe_unused]] int rc = ::ftruncate(fd_, before);
      }
      throw Error(ErrorCode::kIo, std::string("event log write failed: ") + std::strerror(err));
    }
  }
  std::unique_lock<std::shared_mutex> w(read_mu_);
  events_.push_back(e);
  return e;
}

std::vector<StoredEvent> EventStore::snapshot(const ExportFilter& filter) const {
  std::shared_lock<std::shared_mutex> r(read_mu_);
  std::vector<StoredEvent> out;
  for (const auto& e : events_) {
    if (filter.matches(e)) out.push_back(e);
  }
  return out;
}

std::string EventStore::export_ndjson(const ExportFilter& filter) const {
  std::string out;
  for (const auto& e : snapshot(filter)) {
    out += e.to_ndjson();
    out += '\n';
  }
  return out;
}

std::size_t EventStore::size() const {
  std::shared_lock<std::shared_mutex> r(read_mu_);
  return events_.size();
}

}  // namespace learnprof::telemetry
