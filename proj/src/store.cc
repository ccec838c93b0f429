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

#include "flutes/store.h"

#include <fcntl.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstring>
#include <deque>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "flutes/error.h"
#include "flutes/parser.h"
#include "flutes/sexp.h"

namespace flutes {
namespace fs = std::filesystem;

namespace {

constexpr const char* kCatalogFile = "catalog.fsx";
constexpr const char* kUntypedFile = "untyped.fsx";
constexpr const char* kTypedFile = "typed.fsx";
constexpr const char* kAdjacencyFile = "adjacency.fsx";

fs::path class_file(const fs::path& dir, std::string_view name) {
  return dir / fmt::format("class_{}.fsx", name);
}

[[noreturn]] void io_failure(const fs::path& p, std::string_view what) {
  throw Error(ErrorCode::kIo,
              fmt::format("{} {}: {}", what, p.string(), std::strerror(errno)));
}

void write_all(int fd, const fs::path& p, const std::string& content) {
  std::size_t done = 0;
  while (done < content.size()) {
    ssize_t n = ::write(fd, content.data() + done, content.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      io_failure(p, "cannot write");
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_failure(p, "cannot sync");
  }
  ::close(fd);
}

void append_to(const fs::path& p, const std::string& content) {
  if (content.empty()) return;
  int fd = ::open(p.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) io_failure(p, "cannot open");
  write_all(fd, p, content);
}

void write_atomically(const fs::path& p, const std::string& content) {
  fs::path tmp = p;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) io_failure(tmp, "cannot open");
  write_all(fd, tmp, content);
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot rename {}: {}", tmp.string(), ec.message()));
  }
}

struct Line {
  std::size_t number;
  Sexp datum;
};

std::vector<Line> read_log(const fs::path& p) {
  std::vector<Line> out;
  std::ifstream in(p);
  if (!in) return out;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (text.empty()) continue;
    try {
      out.push_back({number, read_sexp(text)});
    } catch (const Error& e) {
      throw Error(ErrorCode::kCorruption,
                  fmt::format("{}:{}: {}", p.string(), number, e.what()));
    }
  }
  return out;
}

[[noreturn]] void corrupt(const fs::path& p, const Line& line,
                          std::string_view message) {
  throw Error(ErrorCode::kCorruption,
              fmt::format("{}:{}: {}", p.string(), line.number, message));
}

// Runs `body`, translating any library error into a corruption report for
// the given line.
template <class F>
void decode(const fs::path& p, const Line& line, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruption) throw;
    corrupt(p, line, e.what());
  }
}

const std::string& head(const fs::path& p, const Line& line) {
  const Sexp& s = line.datum;
  if (s.kind != Sexp::Kind::kList || s.items.empty() ||
      s.items.front().kind != Sexp::Kind::kSymbol) {
    corrupt(p, line, "expected a tagged record");
  }
  return s.items.front().text;
}

std::uint64_t integer_from(const fs::path& p, const Line& line, const Sexp& s) {
  if (s.kind != Sexp::Kind::kSymbol) corrupt(p, line, "expected an integer");
  try {
    std::size_t used = 0;
    auto v = std::stoull(s.text, &used);
    if (used != s.text.size()) corrupt(p, line, "expected an integer");
    return v;
  } catch (const std::logic_error&) {
    corrupt(p, line, "expected an integer");
  }
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// Quantifiers must sit outside any negation and range over a class.
void check_subset_prop(const Prop& p, bool under_not,
                       const std::function<bool(std::string_view)>& known_class) {
  std::visit(
      Overloaded{
          [&](const PropAnd& a) {
            check_subset_prop(a.lhs, under_not, known_class);
            check_subset_prop(a.rhs, under_not, known_class);
          },
          [&](const PropOr& o) {
            check_subset_prop(o.lhs, under_not, known_class);
            check_subset_prop(o.rhs, under_not, known_class);
          },
          [&](const PropNot& n) { check_subset_prop(n.body, true, known_class); },
          [&](const Exists& e) {
            if (under_not) {
              throw Error(ErrorCode::kUnsupportedForm,
                          fmt::format("quantifier over '{}' under negation", e.var));
            }
            const auto* bound = e.bound.as<TyAlias>();
            if (bound == nullptr) {
              throw Error(ErrorCode::kUnsupportedForm,
                          fmt::format("quantifier over '{}' must range over a class",
                                      e.var));
            }
            if (!known_class(bound->name)) {
              throw Error(ErrorCode::kDanglingAlias,
                          fmt::format("unknown class '{}'", bound->name));
            }
            check_subset_prop(e.body, under_not, known_class);
          },
          [](const auto&) {},
      },
      static_cast<const PropNode::variant&>(p.node()));
}

}  // namespace

bool valid_class_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '_' && c != '-') return false;
  }
  return true;
}

std::size_t insert_program(Store& store, std::string_view text) {
  auto declarations = parse_program(text, &store.taxonomy(), [&store](std::string_view n) {
    return store.has_term(n);
  });
  for (const auto& d : declarations) store.abox_insert(d.name, d.body);
  return declarations.size();
}

std::optional<std::size_t> KbClass::member_index(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

Store Store::open(const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, fmt::format("cannot create {}: {}",
                                            directory.string(), ec.message()));
  }
  Store store;
  store.directory_ = directory;
  store.load();
  return store;
}

void Store::same_as(std::string_view a, std::string_view b) {
  taxonomy_.same_as(mk_concept(a), mk_concept(b));
}

void Store::add_is_a(std::string_view child, std::string_view parent) {
  taxonomy_.add_is_a(mk_concept(child), mk_concept(parent));
}

bool Store::has_term(std::string_view name) const {
  std::string key(name);
  return untyped_index_.contains(key) || typed_index_.contains(key);
}

const TypedTerm* Store::find_typed(std::string_view name) const {
  auto it = typed_index_.find(std::string(name));
  return it == typed_index_.end() ? nullptr : &typed_[it->second];
}

const KbClass* Store::find_class(std::string_view name) const {
  auto it = class_index_.find(std::string(name));
  return it == class_index_.end() ? nullptr : &classes_[it->second];
}

const KbClass& Store::get_class(std::string_view name) const {
  if (const auto* c = find_class(name)) return *c;
  throw Error(ErrorCode::kUnknownName, fmt::format("unknown class '{}'", name));
}

KbClass& Store::mutable_class(std::string_view name) {
  auto it = class_index_.find(std::string(name));
  if (it == class_index_.end()) {
    throw Error(ErrorCode::kUnknownName, fmt::format("unknown class '{}'", name));
  }
  return classes_[it->second];
}

void Store::add_edges(const std::string& from, const std::set<std::string>& to) {
  auto& out = forward_[from];
  for (const auto& name : to) {
    if (out.insert(name).second) {
      reverse_[name].insert(from);
      edge_log_.emplace_back(from, name);
    }
  }
}

void Store::abox_insert(const std::string& name, const Term& t) {
  if (name.empty() || name.find('#') != std::string::npos) {
    throw Error(ErrorCode::kConstruction,
                fmt::format("invalid term name '{}'", name));
  }
  if (has_term(name) || derived_.contains(name)) {
    throw Error(ErrorCode::kDuplicateName,
                fmt::format("term '{}' is already bound", name));
  }
  auto refs = alias_names(t);
  // The new term closes a cycle iff it is reachable from one of its own
  // references through existing (possibly forward) edges.
  std::deque<std::string> queue(refs.begin(), refs.end());
  std::unordered_set<std::string> seen(refs.begin(), refs.end());
  while (!queue.empty()) {
    std::string current = std::move(queue.front());
    queue.pop_front();
    if (current == name) {
      throw Error(ErrorCode::kAliasCycle,
                  fmt::format("term '{}' would reference itself", name));
    }
    if (auto it = forward_.find(current); it != forward_.end()) {
      for (const auto& next : it->second) {
        if (seen.insert(next).second) queue.push_back(next);
      }
    }
  }
  untyped_index_.emplace(name, untyped_.size());
  untyped_.push_back({name, t});
  add_edges(name, refs);
}

void Store::mk_kb_class(const std::string& name, const Type& type) {
  if (!valid_class_name(name)) {
    throw Error(ErrorCode::kConstruction, fmt::format("invalid class name '{}'", name));
  }
  if (class_index_.contains(name)) {
    throw Error(ErrorCode::kDuplicateClass,
                fmt::format("class '{}' is already defined", name));
  }
  if (const auto* s = type.as<SubsetTy>()) {
    check_subset_prop(s->prop, false, [this](std::string_view c) {
      return find_class(c) != nullptr;
    });
    auto bindable = free_vars(s->binding_term);
    for (const auto& v : free_vars(s->prop)) {
      if (!bindable.contains(v)) {
        throw Error(ErrorCode::kUnsupportedForm,
                    fmt::format("variable '{}' is neither quantified nor in the binding term", v));
      }
    }
  }
  Type schema = expand_type_names(type, type_names());
  class_index_.emplace(name, classes_.size());
  classes_.push_back(KbClass(name, type, std::move(schema)));
}

std::set<std::string> Store::contains(std::string_view name) const {
  std::string key(name);
  if (!has_term(key) && !derived_.contains(key)) {
    throw Error(ErrorCode::kUnknownName, fmt::format("unknown term '{}'", name));
  }
  auto it = forward_.find(key);
  return it == forward_.end() ? std::set<std::string>{} : it->second;
}

std::set<std::string> Store::contained_by(std::string_view name) const {
  std::string key(name);
  if (!has_term(key) && !derived_.contains(key)) {
    throw Error(ErrorCode::kUnknownName, fmt::format("unknown term '{}'", name));
  }
  auto it = reverse_.find(key);
  return it == reverse_.end() ? std::set<std::string>{} : it->second;
}

std::set<std::string> Store::nearest(std::size_t k, std::string_view t,
                                     std::string_view c) const {
  std::string start(t);
  if (!has_term(start) && !derived_.contains(start)) {
    throw Error(ErrorCode::kUnknownName, fmt::format("unknown term '{}'", t));
  }
  const KbClass& cls = get_class(c);
  std::set<std::string> out;
  std::unordered_map<std::string, std::size_t> depth{{start, 0}};
  std::deque<std::string> queue{start};
  while (!queue.empty()) {
    std::string current = std::move(queue.front());
    queue.pop_front();
    std::size_t d = depth.at(current);
    if (cls.has_member(current)) out.insert(current);
    if (d == k) continue;
    auto visit = [&](const std::unordered_map<std::string, std::set<std::string>>& edges) {
      auto it = edges.find(current);
      if (it == edges.end()) return;
      for (const auto& next : it->second) {
        if (depth.emplace(next, d + 1).second) queue.push_back(next);
      }
    };
    visit(forward_);
    visit(reverse_);
  }
  return out;
}

std::optional<Type> Store::alias_type(std::string_view name) const {
  if (const auto* t = find_typed(name)) return t->type;
  auto it = derived_.find(std::string(name));
  if (it == derived_.end()) return std::nullopt;
  return classes_[it->second.first].members_[it->second.second].type;
}

std::optional<Term> Store::alias_term(std::string_view name) const {
  if (const auto* t = find_typed(name)) return t->term;
  auto it = derived_.find(std::string(name));
  if (it == derived_.end()) return std::nullopt;
  return classes_[it->second.first].members_[it->second.second].term;
}

AliasTypes Store::alias_types() const {
  return [this](std::string_view name) { return alias_type(name); };
}

TypeNames Store::type_names() const {
  return [this](std::string_view name) -> std::optional<Type> {
    if (const auto* c = find_class(name)) return c->definition();
    return std::nullopt;
  };
}

void Store::promote(const std::vector<std::pair<std::string, Type>>& inferred) {
  if (inferred.empty()) return;
  std::unordered_set<std::string> moved;
  for (const auto& [name, type] : inferred) {
    auto it = untyped_index_.find(name);
    if (it == untyped_index_.end()) {
      throw Error(ErrorCode::kUnknownName,
                  fmt::format("'{}' is not an untyped term", name));
    }
    if (!moved.insert(name).second) continue;
    std::uint64_t id = typed_.size() + 1;
    typed_index_.emplace(name, typed_.size());
    typed_.push_back({id, name, untyped_[it->second].term, type});
  }
  std::vector<UntypedTerm> remaining;
  remaining.reserve(untyped_.size() - moved.size());
  untyped_index_.clear();
  for (auto& u : untyped_) {
    if (moved.contains(u.name)) continue;
    untyped_index_.emplace(u.name, remaining.size());
    remaining.push_back(std::move(u));
  }
  untyped_ = std::move(remaining);
}

std::string Store::member_name_for(const KbClass& c, const Term& t) const {
  if (const auto* a = t.as<TermAlias>()) return a->name;
  std::string base =
      fmt::format("{}#{:016x}", c.name(), fnv1a(render_sexp(t)));
  std::string name = base;
  for (int i = 1; has_term(name) || c.has_member(name) || derived_.contains(name);
       ++i) {
    name = fmt::format("{}~{}", base, i);
  }
  return name;
}

bool Store::add_member(std::string_view class_name, const Term& t, std::string name) {
  auto cls_it = class_index_.find(std::string(class_name));
  if (cls_it == class_index_.end()) {
    throw Error(ErrorCode::kUnknownName,
                fmt::format("unknown class '{}'", class_name));
  }
  KbClass& cls = classes_[cls_it->second];
  if (name.empty()) {
    if (cls.has_term(t)) return false;
    name = member_name_for(cls, t);
    if (cls.has_member(name)) {
      throw Error(ErrorCode::kDuplicateName,
                  fmt::format("class '{}' already has a member named '{}'",
                              class_name, name));
    }
  } else if (auto existing = cls.member_index(name)) {
    if (cls.members_[*existing].term == t) return false;
    throw Error(ErrorCode::kDuplicateName,
                fmt::format("class '{}' already has a member named '{}'",
                            class_name, name));
  }
  auto type = infer_static_type(t, alias_types(), &taxonomy_);
  std::size_t index = cls.members_.size();
  cls.members_.push_back({name, t, std::move(type)});
  cls.by_name_.emplace(name, index);
  cls.terms_.insert(t);
  if (!has_term(name) && !derived_.contains(name)) {
    derived_.emplace(name, std::make_pair(cls_it->second, index));
    add_edges(name, alias_names(t));
  }
  return true;
}

void Store::set_watermark(std::string_view class_name, std::uint64_t watermark) {
  mutable_class(class_name).watermark_ = watermark;
}

void Store::set_dependency_watermark(std::string_view class_name,
                                     const std::string& dependency,
                                     std::size_t count) {
  mutable_class(class_name).dependency_watermarks_[dependency] = count;
}

bool Store::member_conforms(const KbClass& c, const Member& m) const {
  return conforms_exactly(m.term, c.schema(), taxonomy_, alias_types());
}

StoreStats Store::stats() const {
  StoreStats s;
  s.untyped = untyped_.size();
  s.typed = typed_.size();
  s.classes = classes_.size();
  for (const auto& c : classes_) s.members += c.members().size();
  s.edges = edge_log_.size();
  return s;
}

void Store::flush() {
  if (!directory_) return;
  const fs::path& dir = *directory_;

  std::string catalog;
  for (const auto& [a, b] : taxonomy_.same_as_log()) {
    catalog += fmt::format("(same_as {} {})\n", render_concept(a), render_concept(b));
  }
  for (const auto& [child, parent] : taxonomy_.is_a_edges()) {
    catalog += fmt::format("(is_a {} {})\n", render_concept(child),
                           render_concept(parent));
  }
  for (const auto& c : classes_) {
    catalog += fmt::format("(class {} {})\n", quote_string(c.name()),
                           render_sexp(c.definition()));
  }
  for (const auto& c : classes_) {
    if (c.is_subset()) {
      for (const auto& [dep, count] : c.dependency_watermarks()) {
        catalog += fmt::format("(watermark {} {} {})\n", quote_string(c.name()),
                               quote_string(dep), count);
      }
    } else {
      catalog += fmt::format("(watermark {} {})\n", quote_string(c.name()),
                             c.watermark());
    }
  }
  write_atomically(dir / kCatalogFile, catalog);

  std::string untyped;
  for (const auto& u : untyped_) {
    untyped += fmt::format("(term {} {})\n", quote_string(u.name), render_sexp(u.term));
  }
  write_atomically(dir / kUntypedFile, untyped);

  std::string typed;
  for (std::size_t i = typed_persisted_; i < typed_.size(); ++i) {
    const auto& t = typed_[i];
    typed += fmt::format("(typed {} {} {} {})\n", t.id, quote_string(t.name),
                         render_sexp(t.term), render_sexp(t.type));
  }
  append_to(dir / kTypedFile, typed);
  typed_persisted_ = typed_.size();

  for (auto& c : classes_) {
    std::string members;
    for (std::size_t i = c.persisted_; i < c.members_.size(); ++i) {
      const auto& m = c.members_[i];
      members += fmt::format("(member {} {})\n", quote_string(m.name),
                             render_sexp(m.term));
    }
    fs::path p = class_file(dir, c.name());
    if (!members.empty() || !fs::exists(p)) {
      append_to(p, members);
      if (!fs::exists(p)) write_atomically(p, "");
    }
    c.persisted_ = c.members_.size();
  }

  std::string edges;
  for (std::size_t i = edges_persisted_; i < edge_log_.size(); ++i) {
    edges += fmt::format("(edge {} {})\n", quote_string(edge_log_[i].first),
                         quote_string(edge_log_[i].second));
  }
  append_to(dir / kAdjacencyFile, edges);
  edges_persisted_ = edge_log_.size();
}

void Store::load() {
  const fs::path& dir = *directory_;

  fs::path catalog = dir / kCatalogFile;
  std::vector<std::pair<Line, std::string>> watermarks;
  for (const auto& line : read_log(catalog)) {
    const std::string& tag = head(catalog, line);
    const auto& items = line.datum.items;
    decode(catalog, line, [&] {
      if (tag == "same_as" && items.size() == 3) {
        taxonomy_.same_as(concept_from_sexp(items[1]), concept_from_sexp(items[2]));
      } else if (tag == "is_a" && items.size() == 3) {
        taxonomy_.add_is_a(concept_from_sexp(items[1]), concept_from_sexp(items[2]));
      } else if (tag == "class" && items.size() == 3) {
        std::string name = string_from_sexp(items[1]);
        Type definition = type_from_sexp(items[2]);
        if (!valid_class_name(name) || class_index_.contains(name)) {
          corrupt(catalog, line, fmt::format("bad class '{}'", name));
        }
        Type schema = expand_type_names(definition, type_names());
        class_index_.emplace(name, classes_.size());
        classes_.push_back(KbClass(name, definition, std::move(schema)));
      } else if (tag == "watermark" && (items.size() == 3 || items.size() == 4)) {
        KbClass& c = mutable_class(string_from_sexp(items[1]));
        if (items.size() == 3) {
          c.watermark_ = integer_from(catalog, line, items[2]);
        } else {
          c.dependency_watermarks_[string_from_sexp(items[2])] =
              integer_from(catalog, line, items[3]);
        }
      } else {
        corrupt(catalog, line, fmt::format("unexpected '{}' record", tag));
      }
    });
  }

  fs::path untyped = dir / kUntypedFile;
  for (const auto& line : read_log(untyped)) {
    decode(untyped, line, [&] {
      const auto& items = line.datum.items;
      if (head(untyped, line) != "term" || items.size() != 3) {
        corrupt(untyped, line, "expected (term NAME TERM)");
      }
      std::string name = string_from_sexp(items[1]);
      if (untyped_index_.contains(name)) corrupt(untyped, line, "duplicate term");
      untyped_index_.emplace(name, untyped_.size());
      untyped_.push_back({std::move(name), term_from_sexp(items[2])});
    });
  }

  fs::path typed = dir / kTypedFile;
  for (const auto& line : read_log(typed)) {
    decode(typed, line, [&] {
      const auto& items = line.datum.items;
      if (head(typed, line) != "typed" || items.size() != 5) {
        corrupt(typed, line, "expected (typed ID NAME TERM TYPE)");
      }
      std::uint64_t id = integer_from(typed, line, items[1]);
      if (id != typed_.size() + 1) corrupt(typed, line, "typed ids out of sequence");
      std::string name = string_from_sexp(items[2]);
      if (has_term(name)) corrupt(typed, line, "duplicate term");
      typed_index_.emplace(name, typed_.size());
      typed_.push_back({id, std::move(name), term_from_sexp(items[3]),
                        type_from_sexp(items[4])});
    });
  }
  typed_persisted_ = typed_.size();

  for (std::size_t ci = 0; ci < classes_.size(); ++ci) {
    KbClass& c = classes_[ci];
    fs::path p = class_file(dir, c.name());
    for (const auto& line : read_log(p)) {
      decode(p, line, [&] {
        const auto& items = line.datum.items;
        if (head(p, line) != "member" || items.size() != 3) {
          corrupt(p, line, "expected (member NAME TERM)");
        }
        std::string name = string_from_sexp(items[1]);
        Term t = term_from_sexp(items[2]);
        if (c.has_member(name)) corrupt(p, line, "duplicate member");
        auto type = infer_static_type(t, alias_types(), &taxonomy_);
        std::size_t index = c.members_.size();
        c.members_.push_back({name, t, std::move(type)});
        c.by_name_.emplace(name, index);
        c.terms_.insert(t);
        if (!has_term(name) && !derived_.contains(name)) {
          derived_.emplace(name, std::make_pair(ci, index));
        }
      });
    }
    c.persisted_ = c.members_.size();
  }

  fs::path adjacency = dir / kAdjacencyFile;
  for (const auto& line : read_log(adjacency)) {
    decode(adjacency, line, [&] {
      const auto& items = line.datum.items;
      if (head(adjacency, line) != "edge" || items.size() != 3) {
        corrupt(adjacency, line, "expected (edge FROM TO)");
      }
      std::string from = string_from_sexp(items[1]);
      std::string to = string_from_sexp(items[2]);
      if (forward_[from].insert(to).second) {
        reverse_[to].insert(from);
        edge_log_.emplace_back(std::move(from), std::move(to));
      }
    });
  }
  edges_persisted_ = edge_log_.size();
}

}  // namespace flutes
