#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dtsim/syntax.h"

namespace dtsim {

Expr Expr::constant(bool v) {
  Expr e;
  e.kind = Kind::kConst;
  e.value = v;
  return e;
}

Expr Expr::var(std::string n) {
  Expr e;
  e.kind = Kind::kVar;
  e.name = std::move(n);
  return e;
}

Expr Expr::negate(Expr a) {
  Expr e;
  e.kind = Kind::kNot;
  e.args.push_back(std::move(a));
  return e;
}

Expr Expr::conj(Expr a, Expr b) {
  Expr e;
  e.kind = Kind::kAnd;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

Expr Expr::exclusive(Expr a, Expr b) {
  Expr e;
  e.kind = Kind::kXor;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

int SelectTree::depth() const {
  if (is_leaf()) return 0;
  return 1 + branches.front().depth();
}

namespace {

enum class Tok { kIdent, kNumber, kSymbol, kNewline, kEnd };

struct Token {
  Tok type;
  std::string text;
  int line;
  int column;
};

const std::set<std::string, std::less<>> kKeywords = {
    "FLIP", "SECRET", "OBLIVIOUSLY", "FOR", "SEND", "TO",
    "OUTPUT", "DO", "GET", "MACRO", "AS", "ENDMACRO"};

[[noreturn]] void syntax_error(const std::string& msg, int line, int col) {
  throw Error(ErrorKind::kSyntax, msg, line, col);
}

// Newlines inside () or [] are swallowed so statements may wrap.
std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  int depth = 0;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      if (depth == 0 && (out.empty() || out.back().type != Tok::kNewline)) {
        out.push_back({Tok::kNewline, "\n", line, col});
      }
      advance();
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      advance();
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') advance();
      continue;
    }
    const int tl = line;
    const int tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::kIdent, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      std::string digits(text.substr(i, j - i));
      if (digits != "0" && digits != "1") {
        syntax_error("only the constants 0 and 1 exist, got '" + digits + "'", tl, tc);
      }
      out.push_back({Tok::kNumber, digits, tl, tc});
      advance(j - i);
      continue;
    }
    switch (c) {
      case '(':
      case '[':
        ++depth;
        break;
      case ')':
      case ']':
        if (depth == 0) syntax_error(std::string("unbalanced '") + c + "'", tl, tc);
        --depth;
        break;
      case '=':
      case '@':
      case ',':
      case '?':
      case '+':
      case '^':
      case '~':
        break;
      default:
        syntax_error(std::string("unexpected character '") + c + "'", tl, tc);
    }
    out.push_back({Tok::kSymbol, std::string(1, c), tl, tc});
    advance();
  }
  if (depth != 0) syntax_error("unclosed bracket at end of input", line, col);
  out.push_back({Tok::kEnd, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program parse() {
    Program program;
    skip_newlines();
    while (peek().type != Tok::kEnd) {
      if (is_keyword("MACRO")) {
        MacroDef def = parse_macro();
        for (const MacroDef& m : program.macros) {
          if (m.name == def.name) {
            throw Error(ErrorKind::kDuplicateMacro, "macro '" + def.name + "' defined twice",
                        line_of_last_macro_, 1);
          }
        }
        program.macros.push_back(std::move(def));
        defined_.insert(program.macros.back().name);
      } else if (is_keyword("ENDMACRO")) {
        syntax_error("ENDMACRO without MACRO", peek().line, peek().column);
      } else {
        program.body.push_back(parse_statement());
      }
      end_statement();
      skip_newlines();
    }
    program.parties = collect_parties(program.body);
    return program;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool is_keyword(std::string_view kw, std::size_t ahead = 0) const {
    return peek(ahead).type == Tok::kIdent && peek(ahead).text == kw;
  }
  bool is_symbol(char c) const {
    return peek().type == Tok::kSymbol && peek().text[0] == c;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string got = t.type == Tok::kEnd       ? "end of input"
                      : t.type == Tok::kNewline ? "end of line"
                                                : "'" + t.text + "'";
    syntax_error("expected " + what + ", found " + got, t.line, t.column);
  }

  void expect_symbol(char c) {
    if (!is_symbol(c)) fail(std::string("'") + c + "'");
    take();
  }
  void expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail(std::string(kw));
    take();
  }
  std::string expect_ident(const char* what) {
    if (peek().type != Tok::kIdent || kKeywords.count(peek().text)) fail(what);
    return take().text;
  }

  void skip_newlines() {
    while (peek().type == Tok::kNewline) take();
  }
  void end_statement() {
    if (peek().type == Tok::kNewline || peek().type == Tok::kEnd) return;
    fail("end of statement");
  }

  MacroDef parse_macro() {
    line_of_last_macro_ = peek().line;
    expect_keyword("MACRO");
    MacroDef def;
    def.name = expect_ident("macro name");
    def.params = parse_party_groups();
    expect_keyword("AS");
    if (peek().type != Tok::kNewline) fail("end of line after AS");
    skip_newlines();
    while (!is_keyword("ENDMACRO")) {
      if (peek().type == Tok::kEnd) fail("ENDMACRO");
      if (is_keyword("MACRO")) {
        syntax_error("macro definitions cannot be nested", peek().line, peek().column);
      }
      def.body.push_back(parse_statement());
      end_statement();
      skip_newlines();
    }
    take();
    return def;
  }

  std::vector<PartyArgs> parse_party_groups() {
    std::vector<PartyArgs> groups;
    expect_symbol('(');
    if (!is_symbol(')')) {
      while (true) {
        PartyArgs g;
        g.party = expect_ident("party name");
        expect_symbol('(');
        if (!is_symbol(')')) {
          while (true) {
            g.names.push_back(expect_ident("variable name"));
            if (!is_symbol(',')) break;
            take();
          }
        }
        expect_symbol(')');
        groups.push_back(std::move(g));
        if (!is_symbol(',')) break;
        take();
      }
    }
    expect_symbol(')');
    return groups;
  }

  Stmt parse_statement() {
    Stmt stmt;
    stmt.line = peek().line;
    if (is_keyword("SEND")) {
      take();
      Send s;
      s.var = expect_ident("variable name");
      expect_keyword("TO");
      s.to = expect_ident("party name");
      stmt.node = std::move(s);
    } else if (is_keyword("OUTPUT")) {
      take();
      Output o;
      o.var = expect_ident("variable name");
      if (is_symbol('@')) {
        take();
        o.party = expect_ident("party name");
      }
      stmt.node = std::move(o);
    } else if (is_keyword("DO")) {
      const Token at = take();
      MacroCall call;
      call.name = expect_ident("macro name");
      if (!defined_.count(call.name)) {
        throw Error(ErrorKind::kUnknownMacro, "call to undefined macro '" + call.name + "'",
                    at.line, at.column);
      }
      call.parties = parse_party_groups();
      if (is_keyword("GET")) {
        take();
        expect_symbol('(');
        if (!is_symbol(')')) {
          while (true) {
            Rename r;
            r.outer = expect_ident("outer name");
            expect_symbol('=');
            r.inner = expect_ident("inner name");
            call.renames.push_back(std::move(r));
            if (!is_symbol(',')) break;
            take();
          }
        }
        expect_symbol(')');
      }
      stmt.node = std::move(call);
    } else {
      Assign a;
      a.target = expect_ident("statement");
      expect_symbol('=');
      a.rhs = parse_rhs();
      stmt.node = std::move(a);
    }
    return stmt;
  }

  Rhs parse_rhs() {
    if (is_keyword("FLIP") || is_keyword("SECRET")) {
      const bool flip = take().text == "FLIP";
      expect_symbol('@');
      PartyId p = expect_ident("party name");
      if (flip) return FlipRhs{std::move(p)};
      return SecretRhs{std::move(p)};
    }
    if (is_keyword("OBLIVIOUSLY")) {
      take();
      ObliviousRhs o;
      if (!is_symbol('[')) fail("'[' opening an oblivious table");
      o.table = parse_table();
      expect_keyword("FOR");
      o.receiver = expect_ident("party name");
      return o;
    }
    ExprRhs e;
    e.expr = parse_xor();
    if (is_symbol('@')) {
      take();
      e.party = expect_ident("party name");
    }
    return e;
  }

  SelectTree parse_table() {
    if (!is_symbol('[')) {
      SelectTree leaf;
      leaf.leaf = expect_ident("table entry");
      return leaf;
    }
    take();
    SelectTree node;
    node.branches.push_back(parse_table());
    expect_symbol(',');
    node.branches.push_back(parse_table());
    expect_symbol(']');
    expect_symbol('?');
    node.selector = expect_ident("selector variable");
    return node;
  }

  Expr parse_xor() {
    Expr lhs = parse_and();
    while (is_symbol('+')) {
      take();
      lhs = Expr::exclusive(std::move(lhs), parse_and());
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_unary();
    while (is_symbol('^')) {
      take();
      lhs = Expr::conj(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (is_symbol('~')) {
      take();
      return Expr::negate(parse_unary());
    }
    if (is_symbol('(')) {
      take();
      Expr inner = parse_xor();
      expect_symbol(')');
      return inner;
    }
    if (peek().type == Tok::kNumber) return Expr::constant(take().text == "1");
    return Expr::var(expect_ident("expression"));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> defined_;
  int line_of_last_macro_ = 0;
};

void add_party(std::vector<PartyId>& parties, const PartyId& p) {
  for (const PartyId& q : parties) {
    if (q == p) return;
  }
  parties.push_back(p);
}

}  // namespace

std::vector<PartyId> collect_parties(const std::vector<Stmt>& body) {
  std::vector<PartyId> parties;
  for (const Stmt& s : body) {
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      if (const auto* f = std::get_if<FlipRhs>(&a->rhs)) add_party(parties, f->party);
      if (const auto* f = std::get_if<SecretRhs>(&a->rhs)) add_party(parties, f->party);
      if (const auto* e = std::get_if<ExprRhs>(&a->rhs); e && e->party) {
        add_party(parties, *e->party);
      }
      if (const auto* o = std::get_if<ObliviousRhs>(&a->rhs)) add_party(parties, o->receiver);
    } else if (const auto* s2 = std::get_if<Send>(&s.node)) {
      add_party(parties, s2->to);
    } else if (const auto* o = std::get_if<Output>(&s.node); o && o->party) {
      add_party(parties, *o->party);
    } else if (const auto* c = std::get_if<MacroCall>(&s.node)) {
      for (const PartyArgs& g : c->parties) add_party(parties, g.party);
    }
  }
  return parties;
}

Program with_party_order(Program program, const std::vector<PartyId>& order) {
  for (const PartyId& p : program.parties) {
    bool found = false;
    for (const PartyId& q : order) found = found || q == p;
    if (!found) {
      throw Error(ErrorKind::kInvalidConfig, "party '" + p + "' missing from explicit party list");
    }
  }
  std::set<PartyId> seen;
  for (const PartyId& q : order) {
    if (q.empty() || !seen.insert(q).second) {
      throw Error(ErrorKind::kInvalidConfig, "party list must hold distinct nonempty names");
    }
  }
  program.parties = order;
  return program;
}

Program parse_program(std::string_view text) {
  return Parser(lex(text)).parse();
}

Program load_program(std::string_view text) {
  Program p = expand_macros(parse_program(text));
  validate_or_throw(p);
  return p;
}

}  // namespace dtsim
