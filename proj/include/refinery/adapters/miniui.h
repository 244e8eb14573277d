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

#ifndef REFINERY_ADAPTERS_MINIUI_H_
#define REFINERY_ADAPTERS_MINIUI_H_

// MiniUI: the in-repo reference UI language standing behind the compiler and
// renderer contracts.
//
//   program := 'Screen' '{' node* '}'
//   node    := ('VStack' | 'HStack' | 'List') '{' node* '}'
//            | ('Text' | 'Button' | 'Image') STRING
//            | 'Spacer'
//
// Strings are double-quoted, single-line, with \" and \\ escapes. `//` starts
// a comment that runs to end of line. The parser recovers after every error
// so one compile reports every independent fault with its line number.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "refinery/adapters/types.h"

namespace refinery::adapters::miniui {

inline constexpr std::string_view kEmpty = "E_EMPTY";
inline constexpr std::string_view kUnbalanced = "E_UNBALANCED";
inline constexpr std::string_view kUnknownComponent = "E_UNKNOWN_COMPONENT";
inline constexpr std::string_view kBadLiteral = "E_BAD_LITERAL";
inline constexpr std::string_view kRoot = "E_ROOT";
inline constexpr std::string_view kEmptyContainer = "W_EMPTY_CONTAINER";
inline constexpr std::string_view kEmptyText = "W_EMPTY_TEXT";

inline constexpr int kScreenWidth = 390;
inline constexpr int kScreenHeight = 844;

// Every component name except the root, in declaration order.
std::span<const std::string_view> ComponentNames();

struct SyntaxNode {
  std::string component;  // as spelled in source
  std::string literal;
  int line = 0;
  std::vector<SyntaxNode> children;
};

struct ParseResult {
  CompileOutcome outcome;
  SyntaxNode root;  // meaningful only when outcome.success
};

ParseResult Parse(std::string_view source);

// Lays out a successfully parsed tree inside the fixed screen.
WidgetNode Layout(const SyntaxNode& root);

class MiniUiCompiler final : public Compiler {
 public:
  absl::StatusOr<CompileOutcome> Compile(std::string_view source) override;
};

class MiniUiRenderer final : public Renderer {
 public:
  absl::StatusOr<RenderArtifact> Render(std::string_view source) override;
};

}  // namespace refinery::adapters::miniui

#endif  // REFINERY_ADAPTERS_MINIUI_H_
