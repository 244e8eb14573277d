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

#include "refinery/adapters/miniui.h"

#include <array>
#include <cctype>

#include "refinery/common/strings.h"

namespace refinery::adapters::miniui {
namespace {

constexpr std::array<std::string_view, 7> kComponents = {
    "VStack", "HStack", "List", "Text", "Button", "Image", "Spacer"};

bool IsContainer(std::string_view name) {
  return name == "VStack" || name == "HStack" || name == "List";
}
bool IsLeaf(std::string_view name) {
  return name == "Text" || name == "Button" || name == "Image";
}
bool IsComponent(std::string_view name) {
  for (auto c : kComponents) {
    if (c == name) return true;
  }
  return false;
}

enum class Tok { kLBrace, kRBrace, kIdent, kString, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;
  int line = 0;
  int column = 0;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<Diagnostic>& diags)
      : src_(src), diags_(diags) {}

  std::vector<Token> Run() {
    std::vector<Token> tokens;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        Advance();
        continue;
      }
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') Advance();
        continue;
      }
      if (c == '{' || c == '}') {
        tokens.push_back({c == '{' ? Tok::kLBrace : Tok::kRBrace,
                          std::string(1, c), line_, col_});
        Advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        Token t{Tok::kIdent, "", line_, col_};
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
          t.text.push_back(src_[pos_]);
          Advance();
        }
        tokens.push_back(std::move(t));
        continue;
      }
      if (c == '"') {
        tokens.push_back(LexString());
        continue;
      }
      // A run of unrecognised characters is reported once.
      const int line = line_, col = col_;
      std::string run;
      while (pos_ < src_.size() && IsStray(src_[pos_])) {
        run.push_back(src_[pos_]);
        Advance();
      }
      diags_.push_back({line, col, std::string(kBadLiteral),
                        StrCat("unexpected character '", run, "'"),
                        Severity::kError});
    }
    tokens.push_back({Tok::kEnd, "", line_, col_});
    return tokens;
  }

 private:
  static bool IsStray(char c) {
    return !(std::isspace(static_cast<unsigned char>(c)) ||
             std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
             c == '{' || c == '}' || c == '"' || c == '/');
  }

  void Advance() {
    ++pos_;
    ++col_;
  }

  Token LexString() {
    Token t{Tok::kString, "", line_, col_};
    Advance();  // opening quote
    while (pos_ < src_.size() && src_[pos_] != '\n') {
      const char c = src_[pos_];
      if (c == '"') {
        Advance();
        return t;
      }
      if (c == '\\' && pos_ + 1 < src_.size() &&
          (src_[pos_ + 1] == '"' || src_[pos_ + 1] == '\\')) {
        t.text.push_back(src_[pos_ + 1]);
        Advance();
        Advance();
        continue;
      }
      t.text.push_back(c);
      Advance();
    }
    diags_.push_back({t.line, t.column, std::string(kBadLiteral),
                      "unterminated string literal", Severity::kError});
    return t;
  }

  std::string_view src_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
      : toks_(std::move(tokens)), diags_(diags) {}

  SyntaxNode ParseProgram() {
    SyntaxNode root{"Screen", "", 1, {}};
    const Token& first = Peek();
    root.line = first.line;
    if (first.type == Tok::kIdent && first.text == "Screen") {
      Next();
      if (Peek().type == Tok::kLBrace) {
        const int open_line = Next().line;
        root.children = ParseNodes(open_line, /*top_level=*/false);
      } else {
        Error(kUnbalanced, Peek(), "expected '{' after 'Screen'");
        root.children = ParseNodes(0, /*top_level=*/true);
      }
    } else {
      Error(kRoot, first, "missing root 'Screen'");
      root.children = ParseNodes(0, /*top_level=*/true);
    }
    if (Peek().type != Tok::kEnd) {
      bool reported = false;
      while (Peek().type != Tok::kEnd) {
        if (Peek().type == Tok::kRBrace) {
          Error(kUnbalanced, Next(), "unexpected '}'");
          continue;
        }
        if (!reported) {
          Error(kRoot, Peek(), "content after root 'Screen'");
          reported = true;
        }
        ParseNode();
      }
    }
    return root;
  }

 private:
  const Token& Peek() const { return toks_[pos_]; }
  const Token& Next() {
    const Token& t = toks_[pos_];
    if (t.type != Tok::kEnd) ++pos_;
    return t;
  }

  void Error(std::string_view code, const Token& at, std::string message) {
    diags_.push_back({at.line, at.column, std::string(code), std::move(message),
                      Severity::kError});
  }
  void Warn(std::string_view code, int line, std::string message) {
    diags_.push_back({line, std::nullopt, std::string(code), std::move(message),
                      Severity::kWarning});
  }

  // Parses nodes until the matching '}' (consumed) or end of input. With
  // `top_level` set there is no brace to match and stray '}' are errors.
  std::vector<SyntaxNode> ParseNodes(int open_line, bool top_level) {
    std::vector<SyntaxNode> nodes;
    while (true) {
      const Token& t = Peek();
      if (t.type == Tok::kEnd) {
        if (!top_level) {
          diags_.push_back(
              {open_line, std::nullopt, std::string(kUnbalanced),
               StrCat("unbalanced braces: missing closing '}' for '{' "
                            "opened on line ",
                            open_line),
               Severity::kError});
        }
        return nodes;
      }
      if (t.type == Tok::kRBrace) {
        if (!top_level) {
          Next();
          return nodes;
        }
        Error(kUnbalanced, Next(), "unbalanced braces: unexpected '}'");
        continue;
      }
      if (auto node = ParseNode()) nodes.push_back(std::move(*node));
    }
  }

  std::optional<SyntaxNode> ParseNode() {
    const Token t = Next();
    switch (t.type) {
      case Tok::kLBrace: {
        Error(kUnbalanced, t, "unbalanced braces: unexpected '{'");
        ParseNodes(t.line, false);
        return std::nullopt;
      }
      case Tok::kString:
        Error(kBadLiteral, t, "unexpected string literal");
        return std::nullopt;
      case Tok::kRBrace:
      case Tok::kEnd:
        return std::nullopt;
      case Tok::kIdent:
        break;
    }
    SyntaxNode node{t.text, "", t.line, {}};
    if (IsContainer(t.text) || t.text == "Screen") {
      if (t.text == "Screen") Error(kRoot, t, "nested 'Screen'");
      if (Peek().type == Tok::kLBrace) {
        const int open_line = Next().line;
        node.children = ParseNodes(open_line, false);
        if (node.children.empty()) {
          Warn(kEmptyContainer, t.line, StrCat("empty '", t.text, "'"));
        }
      } else {
        Error(kUnbalanced, t, StrCat("expected '{' after '", t.text, "'"));
      }
      return node;
    }
    if (IsLeaf(t.text)) {
      const Token& arg = Peek();
      if (arg.type == Tok::kString && arg.line == t.line) {
        node.literal = Next().text;
        if (node.literal.empty() && t.text != "Image") {
          Warn(kEmptyText, t.line, "empty text literal");
        }
      } else if (arg.type == Tok::kIdent && arg.line == t.line &&
                 !IsComponent(arg.text) && arg.text != "Screen") {
        Error(kBadLiteral, arg,
              StrCat("expected string literal after '", t.text,
                           "', found '", arg.text, "'"));
        node.literal = Next().text;
      } else {
        Error(kBadLiteral, t,
              StrCat("expected string literal after '", t.text, "'"));
      }
      return node;
    }
    if (t.text == "Spacer") return node;

    Error(kUnknownComponent, t, StrCat("unknown component '", t.text, "'"));
    if (Peek().type == Tok::kLBrace) {
      const int open_line = Next().line;
      node.children = ParseNodes(open_line, false);
    } else if (Peek().type == Tok::kString && Peek().line == t.line) {
      node.literal = Next().text;
    }
    return node;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

WidgetNode LayoutNode(const SyntaxNode& node, const Box& box) {
  WidgetNode out;
  out.kind = Lower(node.component);
  out.box = box;
  if (node.component == "Image") {
    out.asset = std::string(kPlaceholderAsset);
  } else if (IsLeaf(node.component)) {
    out.text = node.literal;
  }
  const std::size_t n = node.children.size();
  if (n == 0) return out;
  const bool horizontal = node.component == "HStack";
  for (std::size_t i = 0; i < n; ++i) {
    Box child = box;
    if (horizontal) {
      child.width = box.width / static_cast<double>(n);
      child.x = box.x + child.width * static_cast<double>(i);
    } else {
      child.height = box.height / static_cast<double>(n);
      child.y = box.y + child.height * static_cast<double>(i);
    }
    out.children.push_back(LayoutNode(node.children[i], child));
  }
  return out;
}

}  // namespace

std::span<const std::string_view> ComponentNames() { return kComponents; }

ParseResult Parse(std::string_view source) {
  ParseResult result;
  result.outcome.total_lines = CountLines(source);
  std::vector<Diagnostic>& diags = result.outcome.diagnostics;
  Lexer lexer(source, diags);
  std::vector<Token> tokens = lexer.Run();
  if (tokens.size() == 1 && diags.empty()) {
    diags.push_back({1, std::nullopt, std::string(kEmpty),
                     "source contains no components", Severity::kError});
  } else if (tokens.size() > 1) {
    Parser parser(std::move(tokens), diags);
    result.root = parser.ParseProgram();
  }
  std::stable_sort(diags.begin(), diags.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return std::pair(a.line, a.column.value_or(0)) <
                            std::pair(b.line, b.column.value_or(0));
                   });
  result.outcome.success = result.outcome.error_count() == 0;
  return result;
}

WidgetNode Layout(const SyntaxNode& root) {
  return LayoutNode(root, Box{0, 0, kScreenWidth, kScreenHeight});
}

absl::StatusOr<CompileOutcome> MiniUiCompiler::Compile(std::string_view source) {
  return Parse(source).outcome;
}

absl::StatusOr<RenderArtifact> MiniUiRenderer::Render(std::string_view source) {
  ParseResult parsed = Parse(source);
  if (!parsed.outcome.success) {
    return absl::FailedPreconditionError(
        "render requires a successfully compiling program");
  }
  RenderArtifact artifact;
  artifact.descriptor = Layout(parsed.root);
  artifact.width_px = kScreenWidth;
  artifact.height_px = kScreenHeight;
  artifact.blob = store::MakeBlobRef(artifact.Serialize(),
                                     store::MediaKind::kRenderArtifact);
  return artifact;
}

}  // namespace refinery::adapters::miniui
