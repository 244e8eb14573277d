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

#include <thread>

#include "gtest/gtest.h"
#include "httplib.h"
#include "refinery/adapters/external_compiler.h"
#include "refinery/adapters/generators.h"
#include "refinery/adapters/hash_embedder.h"
#include "refinery/adapters/miniui.h"
#include "testing/fixtures.h"
#include "testing/oracles.h"

namespace refinery::adapters {
namespace {

using ::refinery::testing::OracleEmbed;
using ::refinery::testing::OracleWords;
using ::refinery::testing::TempDir;
using ::refinery::testing::WriteFile;

std::vector<std::string> Codes(const CompileOutcome& o) {
  std::vector<std::string> out;
  for (const auto& d : o.diagnostics) out.push_back(d.code);
  return out;
}

TEST(LinesTest, CountAndSplit) {
  EXPECT_EQ(CountLines(""), 0);
  EXPECT_EQ(CountLines("a"), 1);
  EXPECT_EQ(CountLines("a\n"), 1);
  EXPECT_EQ(CountLines("a\nb"), 2);
  EXPECT_EQ(SplitLines("a\n\nb\n"), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(JoinLines({"a", "b"}, true), "a\nb\n");
  EXPECT_EQ(JoinLines({"a", "b"}, false), "a\nb");
}

TEST(TruncateAtStopTest, CutsAtFirstOccurrence) {
  EXPECT_EQ(TruncateAtStop("abc<|end|>x<|end|>", "<|end|>"), "abc");
  EXPECT_EQ(TruncateAtStop("abc", "<|end|>"), "abc");
  EXPECT_EQ(TruncateAtStop("abc", ""), "abc");
}

TEST(SamplingProfileTest, Validate) {
  SamplingProfile p{"x"};
  EXPECT_TRUE(p.Validate().ok());
  p.top_p = 0.0;
  EXPECT_FALSE(p.Validate().ok());
  p = SamplingProfile{"x"};
  p.max_tokens = 0;
  EXPECT_FALSE(p.Validate().ok());
}

TEST(MiniUiTest, ValidProgramCompiles) {
  const std::string src =
      "Screen {\n"
      "  VStack {\n"
      "    Text \"Hello \\\"you\\\"\"\n"
      "    HStack {\n"
      "      Button \"OK\"\n"
      "      Image \"logo\"\n"
      "    }\n"
      "    Spacer  // filler\n"
      "  }\n"
      "}\n";
  auto result = miniui::Parse(src);
  EXPECT_TRUE(result.outcome.success);
  EXPECT_TRUE(result.outcome.diagnostics.empty());
  EXPECT_EQ(result.outcome.total_lines, 10);
  ASSERT_EQ(result.root.children.size(), 1u);
  EXPECT_EQ(result.root.children[0].children[0].literal, "Hello \"you\"");
}

TEST(MiniUiTest, EmptySource) {
  auto o = miniui::Parse("  \n// nothing\n").outcome;
  EXPECT_FALSE(o.success);
  EXPECT_EQ(Codes(o), std::vector<std::string>{"E_EMPTY"});
}

TEST(MiniUiTest, MissingBraceReportedAtOpeningLine) {
  auto o = miniui::Parse("Screen {\n  VStack {\n    Text \"a\"\n}\n").outcome;
  EXPECT_FALSE(o.success);
  ASSERT_EQ(o.diagnostics.size(), 1u);
  EXPECT_EQ(o.diagnostics[0].code, "E_UNBALANCED");
  EXPECT_EQ(o.diagnostics[0].line, 1);
}

TEST(MiniUiTest, ExtraBrace) {
  auto o = miniui::Parse("Screen {\n  Text \"a\"\n}\n}\n").outcome;
  EXPECT_FALSE(o.success);
  ASSERT_EQ(o.diagnostics.size(), 1u);
  EXPECT_EQ(o.diagnostics[0].code, "E_UNBALANCED");
  EXPECT_EQ(o.diagnostics[0].line, 4);
}

TEST(MiniUiTest, UnknownComponent) {
  auto o = miniui::Parse("Screen {\n  Carousel \"x\"\n  Vstack {\n  }\n}\n").outcome;
  EXPECT_EQ(Codes(o), (std::vector<std::string>{"E_UNKNOWN_COMPONENT", "E_UNKNOWN_COMPONENT"}));
  EXPECT_EQ(o.diagnostics[0].line, 2);
  EXPECT_EQ(o.diagnostics[0].column, 3);
  EXPECT_EQ(o.diagnostics[1].line, 3);
}

TEST(MiniUiTest, BadLiterals) {
  auto o = miniui::Parse("Screen {\n  Text \"open\n  Button Save\n  Image\n  \"x\"\n}\n").outcome;
  ASSERT_EQ(o.diagnostics.size(), 4u);
  EXPECT_EQ(o.diagnostics[0].code, "E_BAD_LITERAL");  // unterminated
  EXPECT_EQ(o.diagnostics[0].line, 2);
  EXPECT_EQ(o.diagnostics[1].line, 3);  // ident instead of string
  EXPECT_EQ(o.diagnostics[2].line, 4);
  EXPECT_EQ(o.diagnostics[2].message, "expected string literal after 'Image'");
  EXPECT_EQ(o.diagnostics[3].line, 5);  // stray string
}

TEST(MiniUiTest, RootErrors) {
  auto missing = miniui::Parse("VStack {\n  Text \"a\"\n}\n").outcome;
  EXPECT_EQ(Codes(missing), std::vector<std::string>{"E_ROOT"});
  EXPECT_EQ(missing.diagnostics[0].message, "missing root 'Screen'");
  auto trailing = miniui::Parse("Screen {\n}\nText \"a\"\n").outcome;
  EXPECT_EQ(Codes(trailing), std::vector<std::string>{"E_ROOT"});
  EXPECT_EQ(trailing.diagnostics[0].line, 3);
}

TEST(MiniUiTest, WarningsDoNotFailCompilation) {
  auto o = miniui::Parse("Screen {\n  VStack {\n  }\n  Text \"\"\n}\n").outcome;
  EXPECT_TRUE(o.success);
  EXPECT_EQ(Codes(o), (std::vector<std::string>{"W_EMPTY_CONTAINER", "W_EMPTY_TEXT"}));
  EXPECT_EQ(o.error_count(), 0);
}

TEST(MiniUiTest, StrayCharacters) {
  auto o = miniui::Parse("Screen {\n  Text \"a\" ;;\n}\n").outcome;
  ASSERT_EQ(o.diagnostics.size(), 1u);
  EXPECT_EQ(o.diagnostics[0].code, "E_BAD_LITERAL");
  EXPECT_EQ(o.diagnostics[0].column, 12);
}

TEST(MiniUiTest, DiagnosticsSortedByPosition) {
  auto o = miniui::Parse("Screen {\n  Foo\n  Text Bar\n  Baz {\n").outcome;
  for (std::size_t i = 1; i < o.diagnostics.size(); ++i) {
    const auto& a = o.diagnostics[i - 1];
    const auto& b = o.diagnostics[i];
    EXPECT_LE(std::pair(a.line, a.column.value_or(0)), std::pair(b.line, b.column.value_or(0)));
  }
}

TEST(MiniUiTest, LayoutSplitsAxes) {
  auto parsed = miniui::Parse("Screen {\n  HStack {\n    Text \"a\"\n    Image \"x\"\n  }\n  Spacer\n}\n");
  ASSERT_TRUE(parsed.outcome.success);
  const WidgetNode root = miniui::Layout(parsed.root);
  EXPECT_EQ(root.kind, "screen");
  EXPECT_EQ(root.box, (Box{0, 0, 390, 844}));
  ASSERT_EQ(root.children.size(), 2u);
  const WidgetNode& row = root.children[0];
  EXPECT_EQ(row.box, (Box{0, 0, 390, 422}));
  EXPECT_EQ(row.children[0].box, (Box{0, 0, 195, 422}));
  EXPECT_EQ(row.children[1].box, (Box{195, 0, 195, 422}));
  EXPECT_EQ(row.children[0].text, "a");
  EXPECT_EQ(row.children[1].asset, "PLACEHOLDER");
  EXPECT_EQ(root.children[1].box, (Box{0, 422, 390, 422}));
}

TEST(MiniUiTest, RendererRequiresCompilingSource) {
  miniui::MiniUiRenderer renderer;
  EXPECT_EQ(renderer.Render("Screen {").status().code(), absl::StatusCode::kFailedPrecondition);
  auto a = renderer.Render("Screen {\n  Text \"a\"\n}\n");
  auto b = renderer.Render("Screen { Text \"a\" }");
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->width_px, 390);
  EXPECT_EQ(a->height_px, 844);
  EXPECT_EQ(a->blob.key, b->blob.key);  // layout, not formatting, is rendered
  EXPECT_EQ(a->blob.key, store::Sha256Hex(a->Serialize()));
}

TEST(CompileOutcomeTest, JsonRoundTrip) {
  auto o = miniui::Parse("Screen {\n  Foo\n").outcome;
  auto back = CompileOutcomeFromJson(ToJson(o));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, o);
}

TEST(HashEmbedderTest, MatchesOracle) {
  HashEmbedder embedder(64);
  const std::unordered_set<std::string> stop(HashEmbedder::DefaultStopwords().begin(),
                                             HashEmbedder::DefaultStopwords().end());
  for (const std::string text : {"A login screen with an email field and a Sign-In button",
                                 "Settings: dark mode, notifications, 2 toggles",
                                 "music player"}) {
    auto v = embedder.EmbedText(text);
    ASSERT_TRUE(v.ok());
    const auto expected = OracleEmbed(OracleWords(text), 64, stop);
    ASSERT_EQ(v->values.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_NEAR(v->values[i], expected[i], 1e-12);
    }
    EXPECT_NEAR(v->norm, 1.0, 1e-12);
  }
}

TEST(HashEmbedderTest, StopwordsOnlyIsAnError) {
  HashEmbedder embedder;
  EXPECT_EQ(embedder.EmbedText("the and of").status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(HashEmbedder(0).EmbedText("x").ok());
}

TEST(HashEmbedderTest, RenderTokens) {
  miniui::MiniUiRenderer renderer;
  auto art = renderer.Render("Screen {\n  VStack {\n    Text \"Sign in\"\n    Image \"x\"\n  }\n}\n");
  ASSERT_TRUE(art.ok());
  EXPECT_EQ(DescriptorTokens(art->descriptor),
            (std::vector<std::string>{"screen", "vstack", "text", "sign", "in", "image",
                                      "placeholder"}));
  HashEmbedder embedder;
  auto a = embedder.EmbedRender(*art);
  auto b = embedder.EmbedText("screen vstack text sign in image placeholder");
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_NEAR(*Cosine(*a, *b), 1.0, 1e-12);
}

TEST(EmbeddingTest, NormalizeAndCosine) {
  EXPECT_FALSE(Normalize({0.0, 0.0}).ok());
  auto a = Normalize({3.0, 4.0});
  ASSERT_TRUE(a.ok());
  EXPECT_DOUBLE_EQ(a->values[0], 0.6);
  EXPECT_DOUBLE_EQ(a->norm, 1.0);
  auto b = Normalize({1.0, 0.0});
  EXPECT_NEAR(*Cosine(*a, *b), 0.6, 1e-15);
  auto c = Normalize({1.0, 0.0, 0.0});
  EXPECT_FALSE(Cosine(*a, *c).ok());
  auto back = EmbeddingFromJson(ToJson(*a));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->values, a->values);
}

TEST(ScriptedGeneratorTest, LookupAndFaults) {
  ScriptedGenerator gen;
  gen.Add("p1", "*", "Screen {}<|end|>tail");
  gen.Add("p1", "hot", "hot answer");
  gen.AddFault("p2", "*", ScriptedGenerator::Fault::kTimeout);
  gen.AddFault("p3", "*", ScriptedGenerator::Fault::kEmpty);
  gen.Add("p4", "*", "<|end|>only chatter");
  EXPECT_EQ(*gen.Generate("p1", {"cold"}), "Screen {}");
  EXPECT_EQ(*gen.Generate("p1", {"hot"}), "hot answer");
  auto timeout = gen.Generate("p2", {"x"});
  EXPECT_TRUE(IsTransient(timeout.status()));
  EXPECT_TRUE(IsEmptyCompletion(gen.Generate("p3", {"x"}).status()));
  EXPECT_TRUE(IsEmptyCompletion(gen.Generate("p4", {"x"}).status()));
  EXPECT_EQ(gen.Generate("nope", {"x"}).status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(gen.Generate("", {"x"}).ok());
}

TEST(ScriptedGeneratorTest, FromFile) {
  TempDir dir;
  WriteFile(dir / "g.jsonl",
            "{\"prompt\": \"a\", \"profile_id\": \"*\", \"completion\": \"x\"}\n"
            "{\"prompt\": \"b\", \"profile_id\": \"*\", \"fault\": \"timeout\"}\n");
  auto gen = ScriptedGenerator::FromFile(dir / "g.jsonl");
  ASSERT_TRUE(gen.ok()) << gen.status();
  EXPECT_EQ((*gen)->size(), 2u);
  EXPECT_EQ(*(*gen)->Generate("a", {"p"}), "x");
  EXPECT_FALSE(ScriptedGenerator::FromFile(dir / "missing.jsonl").ok());
  WriteFile(dir / "bad.jsonl", "{\"prompt\": \"a\", \"profile_id\": \"*\", \"fault\": \"boom\"}\n");
  EXPECT_FALSE(ScriptedGenerator::FromFile(dir / "bad.jsonl").ok());
}

TEST(SyntheticGeneratorTest, ExtractDescription) {
  EXPECT_EQ(SyntheticGenerator::ExtractDescription("Make \"a login screen.\""), "a login screen");
  EXPECT_EQ(SyntheticGenerator::ExtractDescription("no quotes"), "no quotes");
}

TEST(SyntheticGeneratorTest, DeterministicAndFaultRateBounded) {
  SyntheticGenerator clean(0.0, 7), noisy(1.0, 7);
  miniui::MiniUiCompiler compiler;
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const std::string prompt = "Generate \"screen " + std::to_string(i) + " with photos\"";
    auto a = clean.Generate(prompt, {"default"});
    auto b = clean.Generate(prompt, {"default"});
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_EQ(*a, *b);
    EXPECT_EQ(a->find("<|end|>"), std::string::npos);
    EXPECT_TRUE(compiler.Compile(*a)->success) << *a;
    auto c = noisy.Generate(prompt, {"default"});
    ASSERT_TRUE(c.ok());
    failures += compiler.Compile(*c)->success ? 0 : 1;
  }
  EXPECT_EQ(failures, 50);
}

TEST(SyntheticGeneratorTest, MaxTokensTruncates) {
  SyntheticGenerator gen(0.0, 1);
  SamplingProfile p{"default"};
  p.max_tokens = 3;
  auto text = gen.Generate("Generate \"photo gallery\"", p);
  ASSERT_TRUE(text.ok());
  EXPECT_EQ(OracleWords(*text).size(), 3u);
}

TEST(HttpGeneratorTest, PostsPromptAndMapsErrors) {
  httplib::Server server;
  int calls = 0;
  server.Post("/gen", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    auto body = nlohmann::json::parse(req.body);
    if (body["prompt"] == "busy") {
      res.status = 503;
      return;
    }
    if (body["prompt"] == "bad") {
      res.status = 400;
      return;
    }
    res.set_content(nlohmann::json{{"text", "echo " + body["prompt"].get<std::string>() +
                                                body["stop"].get<std::string>() + "junk"}}
                        .dump(),
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  auto gen = HttpGenerator::Create("http://127.0.0.1:" + std::to_string(port) + "/gen",
                                   std::chrono::seconds(5));
  ASSERT_TRUE(gen.ok());
  EXPECT_EQ(*(*gen)->Generate("hi", {"default"}), "echo hi");
  EXPECT_TRUE(IsTransient((*gen)->Generate("busy", {"default"}).status()));
  EXPECT_EQ((*gen)->Generate("bad", {"default"}).status().code(),
            absl::StatusCode::kInvalidArgument);
  server.stop();
  t.join();
  EXPECT_EQ(calls, 3);
  EXPECT_TRUE(IsTransient((*gen)->Generate("hi", {"default"}).status()));
  EXPECT_FALSE(HttpGenerator::Create("ftp://x").ok());
}

TEST(ExternalCompilerTest, ParsesDiagnostics) {
  auto diags = ParseCompilerOutput(
      "/tmp/x.swift:3:5: error: cannot find 'Foo' in scope\n"
      "noise line\n"
      "/tmp/x.swift:99:1: warning: unused variable 'y'\n",
      10);
  ASSERT_EQ(diags.size(), 2u);
  EXPECT_EQ(diags[0].line, 3);
  EXPECT_EQ(diags[0].column, 5);
  EXPECT_TRUE(diags[0].is_error());
  EXPECT_EQ(diags[0].code.substr(0, 2), "E_");
  EXPECT_EQ(diags[1].line, 10);  // clamped
  EXPECT_FALSE(diags[1].is_error());
  // The code ignores quoted identifiers.
  auto other = ParseCompilerOutput("f:1:1: error: cannot find 'Bar' in scope\n", 1);
  EXPECT_EQ(other[0].code, diags[0].code);
}

TEST(ExternalCompilerTest, RunsCommand) {
  TempDir dir;
  WriteFile(dir / "cc.sh",
            "#!/bin/sh\n"
            "if grep -q BAD \"$1\"; then echo \"$1:2:1: error: bad token\"; exit 1; fi\n"
            "if grep -q CRASH \"$1\"; then exit 3; fi\n"
            "exit 0\n");
  ExternalCompiler compiler("sh " + (dir / "cc.sh").string(), ".swift");
  auto ok = compiler.Compile("fine\n");
  ASSERT_TRUE(ok.ok()) << ok.status();
  EXPECT_TRUE(ok->success);
  auto bad = compiler.Compile("line1\nBAD\n");
  ASSERT_TRUE(bad.ok());
  EXPECT_FALSE(bad->success);
  ASSERT_EQ(bad->diagnostics.size(), 1u);
  EXPECT_EQ(bad->diagnostics[0].line, 2);
  auto crash = compiler.Compile("CRASH\n");
  ASSERT_TRUE(crash.ok());
  EXPECT_EQ(Codes(*crash), std::vector<std::string>{"E_TOOLCHAIN"});
  ExternalCompiler missing("/nonexistent/compiler-binary");
  EXPECT_EQ(missing.Compile("x").status().code(), absl::StatusCode::kFailedPrecondition);
}

}  // namespace
}  // namespace refinery::adapters
