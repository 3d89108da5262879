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

#include "book/preprocessor.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "common/error.hpp"
#include "common/ids.hpp"

namespace learnprof::book {
namespace fs = std::filesystem;

namespace {

const std::regex& directive_pattern() {
  static const std::regex re(R"(\{\{#quiz\s+([^\s}]+)\s*\}\})");
  return re;
}

// Also escapes braces so an expanded chapter never contains a directive.
std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size() + s.size() / 8);
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '{': out += "&#123;"; break;
      case '}': out += "&#125;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, std::string_view content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  out << content;
}

std::string chapter_title(const std::string& text, const fs::path& path) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      auto title = line.substr(2);
      while (!title.empty() && (title.back() == '\r' || title.back() == ' ')) title.pop_back();
      return title;
    }
  }
  return path.stem().string();
}

std::optional<std::string> git_head(const fs::path& root) {
  const std::string cmd = "git -C '" + root.string() + "' rev-parse HEAD 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return std::nullopt;
  char buf[128] = {};
  std::string out;
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
  if (::pclose(pipe) != 0) return std::nullopt;
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out;
}

bool is_within(const fs::path& child, const fs::path& parent) {
  auto rel = child.lexically_relative(parent);
  return !rel.empty() && *rel.begin() != "..";
}

}  // namespace

std::string placeholder_element(const ResolvedQuiz& resolved, const std::string& commit_hash) {
  nlohmann::json schema = quiz::to_json(resolved.quiz);
  schema["name"] = resolved.quiz_name;
  std::string out = "<div class=\"learnprof-quiz\" data-quiz-name=\"";
  out += escape_attribute(resolved.quiz_name);
  out += "\" data-quiz-commit=\"";
  out += escape_attribute(commit_hash);
  out += "\" data-quiz-schema=\"";
  out += escape_attribute(schema.dump());
  out += "\"></div>";
  return out;
}

ExpandedChapter expand_chapter(std::string_view chapter, const std::string& chapter_path,
                               const QuizResolver& resolver, const std::string& commit_hash) {
  ExpandedChapter result;
  std::string_view rest = chapter;
  std::size_t consumed = 0;
  std::match_results<std::string_view::const_iterator> m;
  while (std::regex_search(rest.begin(), rest.end(), m, directive_pattern())) {
    const auto start = static_cast<std::size_t>(m.position(0));
    const auto len = static_cast<std::size_t>(m.length(0));
    const std::string quiz_path = m[1].str();
    result.text.append(rest.substr(0, start));
    ResolvedQuiz resolved;
    try {
      resolved = resolver(quiz_path);
    } catch (const Error& e) {
      throw Error(e.code(), "chapter " + chapter_path + ": quiz " + quiz_path + ": " + e.what());
    }
    result.text += placeholder_element(resolved, commit_hash);
    result.directives.push_back(QuizDirective{chapter_path, quiz_path, consumed + start, len});
    consumed += start + len;
    rest.remove_prefix(start + len);
  }
  result.text.append(rest);
  return result;
}

std::map<std::string, int> BookManifest::question_chapters() const {
  std::map<std::string, int> out;
  for (const auto& [name, entry] : quizzes) {
    for (const auto& q : entry.quiz.questions) out[q.id] = entry.chapter;
  }
  return out;
}

nlohmann::json BookManifest::to_json() const {
  nlohmann::json j;
  j["commitHash"] = commit_hash;
  j["chapters"] = nlohmann::json::array();
  for (const auto& c : chapters) {
    j["chapters"].push_back({{"number", c.number}, {"title", c.title}, {"path", c.path}});
  }
  j["quizzes"] = nlohmann::json::object();
  for (const auto& [name, entry] : quizzes) {
    nlohmann::json q = quiz::to_json(entry.quiz);
    q["chapter"] = entry.chapter;
    j["quizzes"][name] = std::move(q);
  }
  return j;
}

BookManifest BookManifest::from_json(const nlohmann::json& j) {
  BookManifest m;
  try {
    m.commit_hash = j.at("commitHash").get<std::string>();
    for (const auto& c : j.at("chapters")) {
      m.chapters.push_back(ChapterInfo{c.at("number").get<int>(), c.value("title", ""),
                                       c.value("path", "")});
    }
    for (const auto& [name, q] : j.at("quizzes").items()) {
      QuizEntry entry;
      entry.chapter = q.at("chapter").get<int>();
      entry.quiz = quiz::quiz_from_json(q);
      entry.quiz.name = name;
      m.quizzes.emplace(name, std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

BookManifest BookManifest::load(const fs::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

quiz::QuizRegistry registry_from_manifests(const std::vector<BookManifest>& manifests) {
  quiz::QuizRegistry reg;
  for (const auto& m : manifests) {
    for (const auto& [name, entry] : m.quizzes) reg.add(m.commit_hash, entry.quiz);
  }
  return reg;
}

BuildOutcome build_book(const BookConfig& config) {
  BuildOutcome out;
  const fs::path root = fs::weakly_canonical(config.book_root);
  const fs::path quiz_root = fs::weakly_canonical(config.quiz_dir);
  const fs::path output_root = fs::weakly_canonical(config.output_dir);
  if (!fs::is_directory(root)) {
    out.errors.push_back("book root " + config.book_root.string() + " is not a directory");
    return out;
  }

  std::string commit;
  if (config.commit_hash) {
    commit = *config.commit_hash;
  } else if (auto head = git_head(root)) {
    commit = *head;
  }
  if (!is_commit_hash(commit)) {
    out.errors.push_back(commit.empty() ? "no commit hash: pass one or build inside a git checkout"
                                        : "commit hash '" + commit + "' is not 40 hex digits");
    return out;
  }
  out.manifest.commit_hash = commit;

  std::vector<fs::path> chapter_files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".md") continue;
    if (entry.path().filename() == "SUMMARY.md") continue;
    const auto canonical = fs::weakly_canonical(entry.path());
    if (is_within(canonical, quiz_root) || is_within(canonical, output_root)) continue;
    chapter_files.push_back(entry.path());
  }
  std::sort(chapter_files.begin(), chapter_files.end(), [&](const fs::path& a, const fs::path& b) {
    return a.lexically_relative(root).generic_string() < b.lexically_relative(root).generic_string();
  });

  std::map<fs::path, ResolvedQuiz> cache;
  std::vector<std::pair<fs::path, std::string>> processed;
  int number = 0;
  for (const auto& file : chapter_files) {
    ++number;
    const std::string rel = file.lexically_relative(root).generic_string();
    std::string text;
    try {
      text = read_file(file);
    } catch (const Error& e) {
      out.errors.push_back(e.what());
      continue;
    }
    out.manifest.chapters.push_back(ChapterInfo{number, chapter_title(text, file), rel});

    QuizResolver resolver = [&](const std::string& quiz_path) -> ResolvedQuiz {
      const fs::path target = fs::weakly_canonical(file.parent_path() / quiz_path);
      if (auto it = cache.find(target); it != cache.end()) return it->second;
      if (!fs::is_regular_file(target)) {
        throw Error(ErrorCode::kNotFound, "cannot resolve quiz path");
      }
      if (!is_within(target, quiz_root)) {
        throw Error(ErrorCode::kNotFound, "quiz file lies outside the quiz directory");
      }
      auto name = target.lexically_relative(quiz_root);
      name.replace_extension();
      ResolvedQuiz r;
      r.quiz_name = name.generic_string();
      r.quiz = quiz::parse_quiz(read_file(target), r.quiz_name);
      cache.emplace(target, r);
      return r;
    };

    try {
      auto expanded = expand_chapter(text, rel, resolver, commit);
      for (const auto& d : expanded.directives) {
        const auto resolved = resolver(d.quiz_path);
        auto [it, inserted] = out.manifest.quizzes.try_emplace(
            resolved.quiz_name, BookManifest::QuizEntry{number, resolved.quiz});
        if (!inserted && it->second.chapter != number) {
          out.errors.push_back("quiz " + resolved.quiz_name + " is used in chapter " +
                               std::to_string(it->second.chapter) + " and chapter " +
                               std::to_string(number) + " (" + rel + ")");
        }
      }
      processed.emplace_back(file.lexically_relative(root), std::move(expanded.text));
    } catch (const Error& e) {
      out.errors.push_back(e.what());
    }
  }

  for (const auto& [name, entry] : out.manifest.quizzes) {
    auto report = quiz::validate_quiz(entry.quiz, config.oracle);
    if (report.has_errors()) {
      for (const auto& f : report.findings) {
        if (f.severity != quiz::Severity::kError) continue;
        out.errors.push_back("quiz " + name + ": question " + f.question_id + ": [" + f.code +
                             "] " + f.message);
      }
    }
    out.reports.push_back(std::move(report));
  }

  if (!out.errors.empty()) return out;

  for (const auto& [rel, text] : processed) write_file(config.output_dir / rel, text);
  if (fs::exists(root / "SUMMARY.md")) {
    write_file(config.output_dir / "SUMMARY.md", read_file(root / "SUMMARY.md"));
  }
  write_file(config.output_dir / "manifest.json", out.manifest.to_json().dump(2) + "\n");
  out.ok = true;
  return out;
}

}  // namespace learnprof::book
