// Copyright 2026 The Refinery Authors
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

#ifndef REFINERY_TESTS_TESTING_FIXTURES_H_
#define REFINERY_TESTS_TESTING_FIXTURES_H_

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace refinery::testing {

// Self-deleting scratch directory.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "refinery-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Random well-formed MiniUI program, one construct per line.
inline std::string RandomMiniUi(std::mt19937_64& rng, int max_depth = 3) {
  static const char* kWords[] = {"Home", "Profile", "Settings", "Save", "Cancel",
                                 "Inbox", "Search", "Photos", "Music", "Done"};
  std::uniform_int_distribution<int> word(0, 9);
  std::string out = "Screen {\n";
  auto emit = [&](auto&& self, int depth, int indent) -> void {
    std::uniform_int_distribution<int> count(1, 3);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const std::string pad(indent * 2, ' ');
      std::uniform_int_distribution<int> kind(0, depth < max_depth ? 6 : 3);
      switch (kind(rng)) {
        case 0: out += pad + "Text \"" + kWords[word(rng)] + "\"\n"; break;
        case 1: out += pad + "Button \"" + kWords[word(rng)] + "\"\n"; break;
        case 2: out += pad + "Image \"icon\"\n"; break;
        case 3: out += pad + "Spacer\n"; break;
        default: {
          static const char* kContainers[] = {"VStack", "HStack", "List"};
          out += pad + kContainers[kind(rng) % 3] + " {\n";
          self(self, depth + 1, indent + 1);
          out += pad + "}\n";
        }
      }
    }
  };
  emit(emit, 1, 1);
  out += "}\n";
  return out;
}

}  // namespace refinery::testing

#endif  // REFINERY_TESTS_TESTING_FIXTURES_H_
