#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "support.hpp"
#include "thinging/dsl.hpp"

using namespace thinging;

namespace {

const char* const kCorpus[] = {"reservoir", "kant_ci", "murderer", "islamic"};

// Line lengths of the input, for span bound checks.
std::vector<std::size_t> line_lengths(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line.size());
  if (out.empty()) out.push_back(0);
  return out;
}

void check_spans_within(const std::string& text, const Diagnostics& diags) {
  const auto lens = line_lengths(text);
  for (const auto& d : diags) {
    CAPTURE(d.message);
    REQUIRE(d.span.has_value());
    const auto& s = *d.span;
    CHECK(s.start_line >= 1);
    CHECK(s.end_line >= s.start_line);
    CHECK(static_cast<std::size_t>(s.end_line) <= lens.size());
    CHECK(s.start_col >= 1);
    CHECK(static_cast<std::size_t>(s.start_col) <= lens[static_cast<std::size_t>(s.start_line) - 1] + 1);
    CHECK(static_cast<std::size_t>(s.end_col) <= lens[static_cast<std::size_t>(s.end_line) - 1] + 1);
  }
}

}  // namespace

TEST_CASE("empty model serializes to its header line") {
  auto r = parse("model empty\n");
  REQUIRE(r.model.has_value());
  CHECK(serialize(*r.model) == "model empty\n");
}

TEST_CASE("reservoir parses to the expected elements") {
  const Model m = support::load_corpus_model("reservoir");
  std::vector<std::string> things;
  for (const auto& t : m.things) things.push_back(t.name);
  CHECK(things == std::vector<std::string>{"water", "level", "decision"});
  std::vector<std::string> roots;
  for (auto r : m.roots) roots.push_back(m.machines[r].name);
  CHECK(roots == std::vector<std::string>{"source", "valve", "tank", "processor", "decider"});
  REQUIRE(m.triggers.size() == 2);
  CHECK(m.triggers[0].str() == "processor.process ~> decider.create");
  CHECK(m.events.size() == 6);
  REQUIRE(m.chronology.has_value());
}

TEST_CASE("corpus round trip: structure preserved and serialization is a fixed point") {
  for (const char* name : kCorpus) {
    CAPTURE(name);
    const Model m = support::load_corpus_model(name);
    const std::string once = serialize(m);
    auto again = parse(once, {"canon.tm"});
    REQUIRE(again.model.has_value());
    CHECK(again.diagnostics.empty());
    CHECK(support::structural_diff(m, *again.model) == "");
    CHECK(serialize(*again.model) == once);
  }
}

TEST_CASE("random models round trip") {
  support::ModelGenerator gen(20261015);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    const std::string text = gen.next();
    CAPTURE(text);
    auto r = parse(text, {"gen.tm"});
    REQUIRE(r.model.has_value());
    const std::string once = serialize(*r.model);
    auto again = parse(once, {"canon.tm"});
    REQUIRE(again.model.has_value());
    CHECK(support::structural_diff(*r.model, *again.model) == "");
    CHECK(serialize(*again.model) == once);
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("serialization orders items canonically") {
  auto r = parse(
      "model order\n"
      "flow w b.transfer -> a.transfer\n"
      "machine b\n"
      "thing w\n"
      "event e1 { node a.transfer }\n"
      "machine a\n"
      "flow w a.transfer -> a.receive\n"
      "flow w b.create -> b.release\n"
      "flow w b.release -> b.transfer\n",
      {"o.tm"});
  REQUIRE(r.model.has_value());
  CHECK(serialize(*r.model) ==
        "model order\n"
        "thing w\n"
        "machine b\n"
        "machine a\n"
        "flow w b.transfer -> a.transfer\n"
        "flow w a.transfer -> a.receive\n"
        "flow w b.create -> b.release\n"
        "flow w b.release -> b.transfer\n"
        "event e1 {\n"
        "  node a.transfer\n"
        "}\n");
}

TEST_CASE("independent syntax errors on distinct lines are all reported") {
  const std::string text =
      "model broken\n"
      "thing\n"
      "machine a\n"
      "flow w a.create ->\n"
      "thing w\n"
      "trigger a.create ~~> a.process\n";
  auto r = parse(text, {"b.tm"});
  CHECK_FALSE(r.model.has_value());
  CHECK(count_code(r.diagnostics, codes::kSyntax) >= 3);
  check_spans_within(text, r.diagnostics);
  // The dangling arrow is blamed, not the next line.
  bool arrow = false;
  for (const auto& d : r.diagnostics) arrow = arrow || (d.span->start_line == 4 && d.span->start_col == 17);
  CHECK(arrow);
}

TEST_CASE("syntax errors carry spans inside the input") {
  const std::vector<std::string> inputs = {
      "",
      "model",
      "model x\nthing process\n",
      "model x\nmachine a {\n",
      "model x\nflow w a.create -> \n",
      "model x\nthing w\xff\xfe\n",
      "model x\nchronology {\n A -> \n}\n",
      "model x\nevent e perpetual {\n node a\n}\n",
      "model x\n}}}\n{{\n",
      "model x\nthing a b c\n",
  };
  for (const auto& text : inputs) {
    CAPTURE(text);
    auto r = parse(text, {"s.tm"});
    CHECK_FALSE(r.model.has_value());
    CHECK(count_code(r.diagnostics, codes::kSyntax) >= 1);
    check_spans_within(text, r.diagnostics);
  }
}

TEST_CASE("semantic diagnostics point into the file") {
  const std::string text =
      "model sem\n"
      "thing w\n"
      "machine a\n"
      "flow w a.receive -> a.create\n"
      "flow w nowhere.transfer -> a.transfer\n";
  auto r = parse(text, {"sem.tm"});
  CHECK(count_code(r.diagnostics, codes::kFlowIntoCreate) == 1);
  CHECK(count_code(r.diagnostics, codes::kUnresolvedPath) == 1);
  check_spans_within(text, r.diagnostics);
  for (const auto& d : r.diagnostics) {
    if (d.code == "E104") CHECK(d.span->start_line == 4);
    if (d.code == "E101") CHECK(d.span->start_line == 5);
  }
}

TEST_CASE("diagnostic print format") {
  auto r = parse("model x\nthing process\n", {"f.tm"});
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(format_diagnostic(r.diagnostics[0], "f.tm") ==
        "error E001 f.tm:2:7 'process' is a reserved word and cannot name a thing");
}

TEST_CASE("reserved words") {
  for (const char* w : {"model", "thing", "machine", "flow", "trigger", "event", "chronology", "node",
                        "perpetual", "create", "process", "release", "transfer", "receive"}) {
    CHECK(is_reserved_word(w));
  }
  CHECK_FALSE(is_reserved_word("env"));
  CHECK_FALSE(is_reserved_word("water"));
}

TEST_CASE("comments and blank lines are ignored") {
  auto a = parse("model c\nthing w\nmachine m\nflow w m.create -> m.release\n");
  auto b = parse("# head\nmodel c   # name\n\n\nthing w#x\n  machine m\nflow w m.create->m.release\n");
  REQUIRE(a.model.has_value());
  REQUIRE(b.model.has_value());
  CHECK(support::structural_diff(*a.model, *b.model) == "");
}

TEST_CASE("events and chronology parse with spans stored apart from structure") {
  const Model m = support::load_corpus_model("murderer");
  CHECK(m.events.size() == 10);
  REQUIRE(m.chronology.has_value());
  CHECK(m.chronology->nodes.size() == 10);
  CHECK(m.chronology->edges.size() == 9);
  CHECK(m.span_of("event:E8").has_value());
  CHECK(m.span_of("flow:f1").has_value());
}

TEST_CASE("a second chronology block is a duplicate") {
  auto r = parse(
      "model c\nthing w\nmachine m\nflow w m.create -> m.release\n"
      "event a { node m.create }\nevent b { node m.release }\n"
      "chronology {\n a -> b\n}\nchronology {\n b -> a\n}\n");
  CHECK(count_code(r.diagnostics, codes::kDuplicateId) == 1);
}
