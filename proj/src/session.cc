// Copyright 2026 The Flutes Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flutes/session.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/core.h>

#include "flutes/classifier.h"
#include "flutes/error.h"
#include "flutes/sexp.h"

namespace flutes {
namespace {

std::string_view trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits off the first whitespace-delimited word.
std::pair<std::string_view, std::string_view> split_word(std::string_view s) {
  s = trim(s);
  auto end = s.find_first_of(" \t");
  if (end == std::string_view::npos) return {s, {}};
  return {s.substr(0, end), trim(s.substr(end))};
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

void expect_args(std::string_view command, const std::vector<std::string>& args,
                 std::size_t n) {
  if (args.size() != n) {
    throw Error(ErrorCode::kSyntax,
                fmt::format("{} expects {} argument{}", command, n, n == 1 ? "" : "s"));
  }
}

std::size_t parse_count(const std::string& s) {
  std::size_t value = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw Error(ErrorCode::kSyntax, fmt::format("'{}' is not a count", s));
  }
  return value;
}

}  // namespace

std::string Session::help() {
  return "commands:\n"
         "  load <path>\n"
         "  insert <name> := <term>;\n"
         "  defclass <name> <type-sexp>\n"
         "  same_as <a> <b>\n"
         "  is_a <child> <parent>\n"
         "  find-members\n"
         "  defanalytic-nearest <name> <input-class> <output-class> <k> <class>\n"
         "  run-analytic <name>\n"
         "  members <class>\n"
         "  stats\n"
         "  help\n"
         "  quit\n";
}

std::string Session::execute(std::string_view line) {
  auto [command, rest] = split_word(line);
  if (command.empty() || command.front() == '#') return {};
  auto args = words(rest);

  if (command == "load") {
    expect_args(command, args, 1);
    std::ifstream in(args[0]);
    if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot read {}", args[0]));
    std::stringstream text;
    text << in.rdbuf();
    std::size_t n = insert_program(store_, text.str());
    store_.flush();
    return fmt::format("inserted\t{}\n", n);
  }
  if (command == "insert") {
    std::string text(rest);
    if (trim(text).empty()) throw Error(ErrorCode::kSyntax, "insert expects a declaration");
    if (trim(text).back() != ';') text += ';';
    std::size_t n = insert_program(store_, text);
    store_.flush();
    return fmt::format("inserted\t{}\n", n);
  }
  if (command == "defclass") {
    auto [name, type_text] = split_word(rest);
    if (name.empty() || type_text.empty()) {
      throw Error(ErrorCode::kSyntax, "defclass expects a name and a type");
    }
    store_.mk_kb_class(std::string(name), parse_type_sexp(type_text));
    store_.flush();
    return fmt::format("defined\t{}\n", name);
  }
  if (command == "same_as" || command == "same-as") {
    expect_args(command, args, 2);
    store_.same_as(args[0], args[1]);
    store_.flush();
    return "ok\n";
  }
  if (command == "is_a" || command == "is-a") {
    expect_args(command, args, 2);
    store_.add_is_a(args[0], args[1]);
    store_.flush();
    return "ok\n";
  }
  if (command == "find-members") {
    expect_args(command, args, 0);
    auto report = find_members(store_);
    store_.flush();
    return report.render(timings_);
  }
  if (command == "defanalytic-nearest") {
    expect_args(command, args, 5);
    analytics_.mk_analytic(store_, Analytic{args[0], args[1], args[2],
                                            nearest_fn(store_, parse_count(args[3]), args[4]),
                                            true});
    return fmt::format("defined\t{}\n", args[0]);
  }
  if (command == "run-analytic") {
    expect_args(command, args, 1);
    auto report = analytics_.run_analytic(args[0], store_);
    store_.flush();
    return report.render(timings_);
  }
  if (command == "members") {
    expect_args(command, args, 1);
    std::string out;
    for (const auto& m : store_.get_class(args[0]).members()) {
      out += fmt::format("member\t{}\t{}\n", m.name, render_sexp(m.term));
    }
    return out;
  }
  if (command == "stats") {
    expect_args(command, args, 0);
    auto s = store_.stats();
    return fmt::format("untyped\t{}\ntyped\t{}\nclasses\t{}\nmembers\t{}\nedges\t{}\n",
                       s.untyped, s.typed, s.classes, s.members, s.edges);
  }
  if (command == "help") return help();
  if (command == "quit" || command == "exit") {
    finished_ = true;
    return {};
  }
  throw Error(ErrorCode::kSyntax, fmt::format("unknown command '{}'\n{}", command, help()));
}

}  // namespace flutes
