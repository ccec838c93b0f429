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

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "flutes/error.h"
#include "flutes/session.h"
#include "flutes/store.h"

namespace {

constexpr int kOk = 0;
constexpr int kCommandError = 1;
constexpr int kCorrupt = 2;

// Holds an exclusive lock on <store>/LOCK for the life of the session.
class StoreLock {
 public:
  explicit StoreLock(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto path = dir / "LOCK";
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) {
      throw flutes::Error(flutes::ErrorCode::kIo, fmt::format("cannot open {}", path.string()));
    }
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw flutes::Error(flutes::ErrorCode::kIo,
                          fmt::format("store {} is in use", dir.string()));
    }
  }
  ~StoreLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Typed knowledge-base shell"};
  std::string store_dir;
  std::string script;
  bool no_timings = false;
  app.add_option("--store", store_dir, "Store directory (in-memory when omitted)");
  app.add_option("--script", script, "Run commands from a file and stop at the first error")
      ->check(CLI::ExistingFile);
  app.add_flag("--no-timings", no_timings, "Omit elapsed times from reports");
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<StoreLock> lock;
  flutes::Store store;
  try {
    if (!store_dir.empty()) {
      lock = std::make_unique<StoreLock>(store_dir);
      store = flutes::Store::open(store_dir);
    }
  } catch (const flutes::Error& e) {
    std::cerr << "error\t" << e.what() << '\n';
    return e.code() == flutes::ErrorCode::kCorruption ? kCorrupt : kCommandError;
  }

  flutes::Session session(store, !no_timings);
  std::ifstream file;
  if (!script.empty()) file.open(script);
  std::istream& in = script.empty() ? std::cin : file;
  bool interactive = script.empty() && ::isatty(STDIN_FILENO);
  int status = kOk;
  std::string line;
  while (!session.finished()) {
    if (interactive) std::cout << "flutes> " << std::flush;
    if (!std::getline(in, line)) break;
    try {
      std::cout << session.execute(line) << std::flush;
    } catch (const flutes::Error& e) {
      std::cout << "error\t" << e.what() << '\n' << std::flush;
      if (e.code() == flutes::ErrorCode::kCorruption) return kCorrupt;
      status = kCommandError;
      if (!script.empty()) break;
    }
  }
  try {
    store.flush();
  } catch (const flutes::Error& e) {
    std::cerr << "error\t" << e.what() << '\n';
    return kCommandError;
  }
  return script.empty() ? kOk : status;
}
