#include "thinging/dsl.hpp"

#include <array>
#include <cctype>
#include <functional>
#include <sstream>
#include <vector>

#include "thinging/core.hpp"
#include "thinging/events.hpp"

namespace thinging {

namespace {

constexpr std::array<std::string_view, 14> kReserved{
    "model",   "thing",     "machine", "flow",    "trigger",  "event",   "chronology",
    "node",    "perpetual", "create",  "process", "release",  "transfer", "receive"};

enum class Tok { Ident, Dot, Arrow, Squiggle, LBrace, RBrace, Invalid, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
  int end_col = 1;  // inclusive
  bool first_on_line = false;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'->'";
    case Tok::Squiggle: return "'~>'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Invalid: return "invalid character '" + t.text + "'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  int last_line = 0;
  std::size_t i = 0;
  auto push = [&](Tok kind, std::string s, int start_col, int width) {
    Token t{kind, std::move(s), line, start_col, start_col + width - 1, line != last_line};
    last_line = line;
    out.push_back(std::move(t));
  };
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      const int width = static_cast<int>(j - i);
      push(Tok::Ident, std::string(text.substr(i, j - i)), col, width);
      col += width;
      i = j;
    } else if (c == '.') {
      push(Tok::Dot, ".", col, 1);
      ++col;
      ++i;
    } else if (c == '{') {
      push(Tok::LBrace, "{", col, 1);
      ++col;
      ++i;
    } else if (c == '}') {
      push(Tok::RBrace, "}", col, 1);
      ++col;
      ++i;
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      push(Tok::Arrow, "->", col, 2);
      col += 2;
      i += 2;
    } else if (c == '~' && i + 1 < text.size() && text[i + 1] == '>') {
      push(Tok::Squiggle, "~>", col, 2);
      col += 2;
      i += 2;
    } else {
      // One diagnostic per UTF-8 sequence, counted as one column.
      std::size_t j = i + 1;
      if (c >= 0x80) {
        while (j < text.size() && (static_cast<unsigned char>(text[j]) & 0xC0) == 0x80) ++j;
      }
      push(Tok::Invalid, std::string(text.substr(i, j - i)), col, 1);
      ++col;
      i = j;
    }
  }
  Token end{Tok::End, "", line, col, col, true};
  out.push_back(end);
  return out;
}

struct SyntaxError {
  Diagnostic diagnostic;
};

struct ParsedFile {
  ModelElements elements;
  std::vector<EventDecl> events;
  std::vector<ChronologyDecl> chronologies;
  bool has_header = false;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file)
      : tokens_(std::move(tokens)), file_(std::move(file)) {}

  ParsedFile run() {
    parse_header();
    while (peek().kind != Tok::End) {
      guarded([&] { parse_item(); });
    }
    return std::move(result_);
  }

  Diagnostics take_diagnostics() { return std::move(diags_); }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& previous() const { return tokens_[pos_ == 0 ? 0 : pos_ - 1]; }
  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (t.kind != Tok::End) ++pos_;
    return t;
  }

  SourceSpan span_of(const Token& t) const { return {file_, t.line, t.col, t.line, t.end_col}; }
  SourceSpan span_between(const Token& a, const Token& b) const {
    return {file_, a.line, a.col, b.line, b.end_col};
  }

  // The item ended early if the offending token sits on a later line; blame
  // the last token of the item and resume at the offending one.
  [[noreturn]] void fail(const std::string& expected) {
    const Token& t = peek();
    const bool cut_short = pos_ > item_start_ && (t.kind == Tok::End || t.first_on_line);
    if (cut_short) {
      const Token& last = previous();
      throw SyntaxError{make_error(codes::kSyntax, "",
                                   "expected " + expected + " after " + describe(last),
                                   span_of(last))};
    }
    throw SyntaxError{make_error(codes::kSyntax, "",
                                 "expected " + expected + ", found " + describe(t), span_of(t))};
  }

  template <class F>
  void guarded(F&& body) {
    const std::size_t outer = item_start_;
    item_start_ = pos_;
    try {
      body();
    } catch (const SyntaxError& e) {
      diags_.push_back(e.diagnostic);
      recover();
    }
    item_start_ = outer;
  }

  void recover() {
    const Token& t = peek();
    const bool at_line_start = pos_ > item_start_ && t.first_on_line;
    if (at_line_start) return;
    advance();
    while (peek().kind != Tok::End && !peek().first_on_line) advance();
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(what);
    return advance();
  }

  // A name that starts a later line belongs to the next item.
  bool on_later_line() const { return pos_ > item_start_ && peek().first_on_line; }

  std::string expect_name(const std::string& what) {
    if (peek().kind != Tok::Ident || on_later_line()) fail(what);
    if (is_reserved_word(peek().text)) {
      throw SyntaxError{make_error(codes::kSyntax, "",
                                   "'" + peek().text + "' is a reserved word and cannot name " +
                                       what,
                                   span_of(peek()))};
    }
    return advance().text;
  }

  bool at_keyword(std::string_view word) const {
    return peek().kind == Tok::Ident && peek().text == word;
  }

  void parse_header() {
    item_start_ = pos_;
    if (at_keyword("model")) {
      guarded([&] {
        advance();
        result_.elements.name = expect_name("a model name");
        result_.has_header = true;
      });
      return;
    }
    const Token& t = peek();
    diags_.push_back(make_error(codes::kSyntax, "",
                                "expected 'model <name>' at start of file, found " + describe(t),
                                span_of(t)));
  }

  void parse_item() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("an item keyword");
    if (t.text == "thing") {
      const Token& kw = advance();
      std::string name = expect_name("a thing");
      result_.elements.things.push_back({std::move(name), span_between(kw, previous())});
    } else if (t.text == "machine") {
      result_.elements.machines.push_back(parse_machine());
    } else if (t.text == "flow") {
      result_.elements.flows.push_back(parse_flow());
    } else if (t.text == "trigger") {
      result_.elements.triggers.push_back(parse_trigger());
    } else if (t.text == "event") {
      parse_event();
    } else if (t.text == "chronology") {
      parse_chronology();
    } else if (t.text == "model") {
      throw SyntaxError{
          make_error(codes::kSyntax, "", "a file holds exactly one model", span_of(t))};
    } else {
      throw SyntaxError{
          make_error(codes::kSyntax, "", "unknown keyword '" + t.text + "'", span_of(t))};
    }
  }

  MachineDecl parse_machine() {
    const Token& kw = advance();
    MachineDecl decl;
    decl.name = expect_name("a machine");
    decl.span = span_between(kw, previous());
    if (peek().kind == Tok::LBrace) {
      advance();
      while (peek().kind != Tok::RBrace && peek().kind != Tok::End) {
        guarded([&] {
          if (!at_keyword("machine")) fail("'machine' or '}'");
          decl.children.push_back(parse_machine());
        });
      }
      expect(Tok::RBrace, "'}'");
    }
    return decl;
  }

  StagePath parse_stageref() {
    if (peek().kind != Tok::Ident || on_later_line()) fail("a stage reference");
    const Token& first = peek();
    StagePath path;
    std::vector<std::string> segs;
    segs.push_back(advance().text);
    while (peek().kind == Tok::Dot) {
      advance();
      if (peek().kind != Tok::Ident || on_later_line()) fail("a name after '.'");
      segs.push_back(advance().text);
    }
    const Token& last = previous();
    auto kind = parse_stage_kind(segs.back());
    if (segs.size() < 2 || !kind) {
      throw SyntaxError{make_error(codes::kSyntax, "",
                                   "stage reference must end in .create, .process, .release, "
                                   ".transfer or .receive",
                                   span_between(first, last))};
    }
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
      if (is_reserved_word(segs[i]) && segs[i] != kEnvMachine) {
        throw SyntaxError{make_error(codes::kSyntax, "",
                                     "'" + segs[i] + "' is a reserved word, not a machine name",
                                     span_between(first, last))};
      }
    }
    path.kind = *kind;
    segs.pop_back();
    path.segments = std::move(segs);
    path.span = span_between(first, last);
    return path;
  }

  FlowDecl parse_flow() {
    const Token& kw = advance();
    FlowDecl decl;
    decl.thing = expect_name("a thing");
    decl.src = parse_stageref();
    expect(Tok::Arrow, "'->'");
    decl.dst = parse_stageref();
    decl.span = span_between(kw, previous());
    return decl;
  }

  TriggerDecl parse_trigger() {
    const Token& kw = advance();
    TriggerDecl decl;
    decl.src = parse_stageref();
    expect(Tok::Squiggle, "'~>'");
    decl.dst = parse_stageref();
    decl.span = span_between(kw, previous());
    return decl;
  }

  void parse_event() {
    const Token& kw = advance();
    EventDecl decl;
    decl.name = expect_name("an event");
    if (at_keyword("perpetual")) {
      advance();
      decl.perpetual = true;
    }
    expect(Tok::LBrace, "'{'");
    while (peek().kind != Tok::RBrace && peek().kind != Tok::End) {
      guarded([&] {
        if (at_keyword("node")) {
          advance();
          decl.nodes.push_back(parse_stageref());
        } else if (at_keyword("flow")) {
          decl.flows.push_back(parse_flow());
        } else if (at_keyword("trigger")) {
          decl.triggers.push_back(parse_trigger());
        } else {
          fail("'node', 'flow', 'trigger' or '}'");
        }
      });
    }
    expect(Tok::RBrace, "'}'");
    decl.span = span_between(kw, previous());
    result_.events.push_back(std::move(decl));
  }

  void parse_chronology() {
    const Token& kw = advance();
    ChronologyDecl decl;
    expect(Tok::LBrace, "'{'");
    while (peek().kind != Tok::RBrace && peek().kind != Tok::End) {
      guarded([&] {
        const Token& first = peek();
        PrecedenceDecl edge;
        edge.before = expect_name("an event");
        expect(Tok::Arrow, "'->'");
        edge.after = expect_name("an event");
        edge.span = span_between(first, previous());
        decl.edges.push_back(std::move(edge));
      });
    }
    expect(Tok::RBrace, "'}'");
    decl.span = span_between(kw, previous());
    result_.chronologies.push_back(std::move(decl));
  }

  std::vector<Token> tokens_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t item_start_ = 0;
  ParsedFile result_;
  Diagnostics diags_;
};

void write_machine(std::ostringstream& os, const Model& model, std::size_t index, int depth) {
  const Machine& m = model.machines[index];
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  os << indent << "machine " << m.name;
  if (m.children.empty()) {
    os << '\n';
    return;
  }
  os << " {\n";
  for (std::size_t child : m.children) write_machine(os, model, child, depth + 1);
  os << indent << "}\n";
}

}  // namespace

bool is_reserved_word(std::string_view word) {
  for (auto w : kReserved) {
    if (w == word) return true;
  }
  return false;
}

ParseResult parse(std::string_view text, const ParseOptions& options) {
  ParseResult result;
  Parser parser(lex(text), options.file);
  ParsedFile file = parser.run();
  result.diagnostics = parser.take_diagnostics();
  if (has_errors(result.diagnostics)) return result;

  auto built = build_model(file.elements, ValidateOptions{options.lax});
  auto& diags = result.diagnostics;
  diags.insert(diags.end(), built.diagnostics.begin(), built.diagnostics.end());
  if (!built.ok()) return result;

  Model model = std::move(*built.value);
  bool events_ok = true;
  for (const auto& decl : file.events) {
    auto attached = attach_event(model, decl);
    diags.insert(diags.end(), attached.diagnostics.begin(), attached.diagnostics.end());
    if (attached.ok()) {
      model = std::move(*attached.value);
    } else {
      events_ok = false;
    }
  }
  for (std::size_t i = 0; i < file.chronologies.size(); ++i) {
    const auto& decl = file.chronologies[i];
    if (i > 0) {
      diags.push_back(make_error(codes::kDuplicateId, "chronology",
                                 "a model has at most one chronology", decl.span));
      continue;
    }
    model = with_chronology(model, decl);
  }
  if (events_ok) {
    auto chrono = validate_chronology(model);
    diags.insert(diags.end(), chrono.begin(), chrono.end());
  }
  if (!has_errors(diags)) result.model = std::move(model);
  return result;
}

std::string serialize(const Model& model) {
  std::ostringstream os;
  os << "model " << model.name << '\n';
  for (const auto& t : model.things) os << "thing " << t.name << '\n';
  for (std::size_t root : model.roots) write_machine(os, model, root, 0);
  for (const auto& f : model.flows) os << "flow " << f.str() << '\n';
  for (const auto& t : model.triggers) os << "trigger " << t.str() << '\n';
  for (const auto& e : model.events) {
    os << "event " << e.name << (e.perpetual ? " perpetual" : "") << " {\n";
    for (const auto& n : e.nodes) os << "  node " << n.str() << '\n';
    for (const auto& id : e.flows) {
      if (const auto* f = model.find_flow(id)) os << "  flow " << f->str() << '\n';
    }
    for (const auto& id : e.triggers) {
      if (const auto* t = model.find_trigger(id)) os << "  trigger " << t->str() << '\n';
    }
    os << "}\n";
  }
  if (model.chronology) {
    os << "chronology {\n";
    for (const auto& [a, b] : model.chronology->edges) os << "  " << a << " -> " << b << '\n';
    os << "}\n";
  }
  return os.str();
}

}  // namespace thinging
