#include <cctype>
#include <optional>

#include "chorrev/ast.hpp"

namespace chorrev {

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line(line),
      column(column) {}

namespace {

enum class Tok {
  Id, Int, Arrow, Colon, Semi, LParen, RParen, LBrace, RBrace, Bar, Plus, At, Comma,
  Bang, OrOr, AndAnd, Lt, Le, EqEq, Ge, Gt, End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Token next() {
    int line = line_, col = col_;
    char c = src_[pos_];
    auto take = [&](Tok k, int n) {
      std::string text(src_.substr(pos_, n));
      for (int i = 0; i < n; ++i) advance();
      return Token{k, text, line, col};
    };
    auto peek = [&](char expect) { return pos_ + 1 < src_.size() && src_[pos_ + 1] == expect; };

    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t n = 0;
      while (pos_ + n < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_ + n])) || src_[pos_ + n] == '_')) {
        ++n;
      }
      return take(Tok::Id, static_cast<int>(n));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t n = 0;
      while (pos_ + n < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + n]))) ++n;
      return take(Tok::Int, static_cast<int>(n));
    }
    switch (c) {
      case '-':
        if (peek('>')) return take(Tok::Arrow, 2);
        break;
      case ':': return take(Tok::Colon, 1);
      case ';': return take(Tok::Semi, 1);
      case '(': return take(Tok::LParen, 1);
      case ')': return take(Tok::RParen, 1);
      case '{': return take(Tok::LBrace, 1);
      case '}': return take(Tok::RBrace, 1);
      case '+': return take(Tok::Plus, 1);
      case '@': return take(Tok::At, 1);
      case ',': return take(Tok::Comma, 1);
      case '|': return peek('|') ? take(Tok::OrOr, 2) : take(Tok::Bar, 1);
      case '&':
        if (peek('&')) return take(Tok::AndAnd, 2);
        break;
      case '!': return take(Tok::Bang, 1);
      case '<': return peek('=') ? take(Tok::Le, 2) : take(Tok::Lt, 1);
      case '>': return peek('=') ? take(Tok::Ge, 2) : take(Tok::Gt, 1);
      case '=':
        if (peek('=')) return take(Tok::EqEq, 2);
        break;
      default: break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Choreography parse() {
    Choreography g = chor();
    expect(Tok::End, "end of input");
    if (explicit_count_ > 0 && implicit_count_ > 0) {
      throw ParseError("mixed explicit and implicit control points", first_implicit_line_,
                       first_implicit_col_);
    }
    if (explicit_count_ == 0) {
      ControlPoint next = 1;
      number(g, next);
    }
    return g;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Id) && cur().text == kw; }

  [[noreturn]] void fail(const std::string& what) const {
    std::string found = cur().kind == Tok::End ? "end of input" : "'" + cur().text + "'";
    throw ParseError("expected " + what + ", found " + found, cur().line, cur().column);
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail(what);
    return toks_[pos_++];
  }

  std::string identifier(const std::string& what) { return expect(Tok::Id, what).text; }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("'" + std::string(kw) + "'");
    ++pos_;
  }

  int integer() {
    Token t = expect(Tok::Int, "integer");
    try {
      return std::stoi(t.text);
    } catch (const std::out_of_range&) {
      throw ParseError("integer out of range", t.line, t.column);
    }
  }

  // cpann := "@cp" INT ; lexed as '@' Id(cp) Int
  bool at_cp_annotation() const {
    return at(Tok::At) && ahead(1).kind == Tok::Id && ahead(1).text == "cp" && ahead(2).kind == Tok::Int;
  }

  void cp_annotation(Choreography& node, const Token& where) {
    if (at_cp_annotation()) {
      pos_ += 2;
      node.cp = integer();
      ++explicit_count_;
    } else {
      if (implicit_count_++ == 0) {
        first_implicit_line_ = where.line;
        first_implicit_col_ = where.column;
      }
    }
  }

  Choreography chor() {
    Choreography g = term();
    while (at(Tok::Semi)) {
      ++pos_;
      g = Choreography::seq(std::move(g), term());
    }
    return g;
  }

  Choreography term() {
    if (at(Tok::LParen)) {
      ++pos_;
      Choreography g = chor();
      expect(Tok::RParen, "')'");
      return g;
    }
    if (at_keyword("par") && ahead(1).kind != Tok::Arrow) return par();
    if (at_keyword("loop") && ahead(1).kind != Tok::Arrow) return loop();
    if (at_keyword("choice") && ahead(1).kind != Tok::Arrow) return choice();
    return interaction();
  }

  Choreography interaction() {
    Token start = cur();
    Choreography g;
    g.kind = Choreography::Kind::Interaction;
    g.sender = identifier("participant");
    expect(Tok::Arrow, "'->'");
    g.receiver = identifier("participant");
    expect(Tok::Colon, "':'");
    g.message = identifier("message");
    cp_annotation(g, start);
    return g;
  }

  Choreography par() {
    Token start = cur();
    ++pos_;
    Choreography g;
    g.kind = Choreography::Kind::Par;
    cp_annotation(g, start);
    expect(Tok::LBrace, "'{'");
    g.children.push_back(chor());
    while (at(Tok::Bar)) {
      ++pos_;
      g.children.push_back(chor());
    }
    if (g.children.size() < 2) fail("'|'");
    expect(Tok::RBrace, "'}'");
    return g;
  }

  Choreography loop() {
    Token start = cur();
    ++pos_;
    Choreography g;
    g.kind = Choreography::Kind::Loop;
    cp_annotation(g, start);
    expect(Tok::At, "'@'");
    g.controller = identifier("loop controller");
    expect(Tok::LBrace, "'{'");
    g.children.push_back(chor());
    expect(Tok::RBrace, "'}'");
    return g;
  }

  Choreography choice() {
    Token start = cur();
    ++pos_;
    Choreography g;
    g.kind = Choreography::Kind::Choice;
    cp_annotation(g, start);
    if (at(Tok::At)) {
      ++pos_;
      g.active_hint = identifier("active participant");
    }
    expect(Tok::LBrace, "'{'");
    branch(g);
    while (at(Tok::Plus)) {
      ++pos_;
      branch(g);
    }
    if (g.children.size() < 2) fail("'+'");
    expect(Tok::RBrace, "'}'");
    return g;
  }

  void branch(Choreography& g) {
    expect(Tok::LBrace, "'{'");
    g.children.push_back(chor());
    expect(Tok::RBrace, "'}'");
    expect_keyword("unless");
    g.guards.push_back(guard());
  }

  // guard := disj ; disj := conj ("||" conj)* ; conj := unary ("&&" unary)*
  Guard guard() {
    Guard g = conj();
    while (at(Tok::OrOr)) {
      ++pos_;
      g = Guard::disj(std::move(g), conj());
    }
    return g;
  }

  Guard conj() {
    Guard g = unary();
    while (at(Tok::AndAnd)) {
      ++pos_;
      g = Guard::conj(std::move(g), unary());
    }
    return g;
  }

  Guard unary() {
    if (at(Tok::Bang)) {
      ++pos_;
      return Guard::negate(unary());
    }
    if (at(Tok::LParen)) {
      ++pos_;
      Guard g = guard();
      expect(Tok::RParen, "')'");
      return g;
    }
    if (at_keyword("tt")) {
      ++pos_;
      return Guard::tt();
    }
    if (at_keyword("ff")) {
      ++pos_;
      return Guard::ff();
    }
    if (at_keyword("count") && ahead(1).kind == Tok::LParen) {
      pos_ += 2;
      Message m = identifier("message");
      expect(Tok::Comma, "','");
      Channel c = channel();
      expect(Tok::RParen, "')'");
      Comparator cmp = comparator();
      int bound = integer();
      return Guard::count(std::move(m), std::move(c), cmp, bound);
    }
    Message m = identifier("guard");
    expect_keyword("in");
    return Guard::member(std::move(m), channel());
  }

  Channel channel() {
    Channel c;
    c.sender = identifier("participant");
    expect(Tok::Arrow, "'->'");
    c.receiver = identifier("participant");
    return c;
  }

  Comparator comparator() {
    switch (cur().kind) {
      case Tok::Lt: ++pos_; return Comparator::Less;
      case Tok::Le: ++pos_; return Comparator::LessEq;
      case Tok::EqEq: ++pos_; return Comparator::Equal;
      case Tok::Ge: ++pos_; return Comparator::GreaterEq;
      case Tok::Gt: ++pos_; return Comparator::Greater;
      default: fail("comparison operator");
    }
  }

  static void number(Choreography& g, ControlPoint& next) {
    if (g.has_cp()) g.cp = next++;
    for (auto& c : g.children) number(c, next);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int explicit_count_ = 0;
  int implicit_count_ = 0;
  int first_implicit_line_ = 0;
  int first_implicit_col_ = 0;
};

}  // namespace

Choreography parse_choreography(std::string_view text) {
  Lexer lexer(text);
  Parser parser(lexer.run());
  return parser.parse();
}

}  // namespace chorrev
