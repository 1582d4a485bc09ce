#include "certivex/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace certivex {

namespace {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Semi,
  Comma,
  Assign,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
  Bang,
  AndAnd,
  OrOr,
  Annot,  // `//@`
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceLoc loc;
};

// Literals longer than this are certainly out of range; clamp so the range
// check reports them instead of overflowing.
constexpr std::int64_t kLiteralClamp = 1'000'000'000'000LL;

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      SourceLoc loc{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", loc});
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          id += advance();
        }
        out.push_back({Tok::Ident, id, loc});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string digits;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          digits += advance();
        }
        if (pos_ < src_.size() &&
            (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          throw ParseError(loc, "malformed integer literal");
        }
        if (digits.size() > 1 && digits[0] == '0') {
          throw ParseError(loc, "octal literals are not supported");
        }
        out.push_back({Tok::Number, digits, loc});
      } else if (src_.substr(pos_, 3) == "//@") {
        advance(3);
        out.push_back({Tok::Annot, "//@", loc});
      } else {
        out.push_back(punct(loc));
      }
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) advance();
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//" && src_.substr(pos_, 3) != "//@") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        SourceLoc start{line_, col_};
        advance(2);
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) throw ParseError(start, "unterminated comment");
        advance(2);
      } else {
        return;
      }
    }
  }

  Token punct(SourceLoc loc) {
    auto two = src_.substr(pos_, 2);
    struct Two {
      std::string_view text;
      Tok kind;
    };
    static constexpr Two kTwo[] = {{"<=", Tok::Le}, {">=", Tok::Ge}, {"==", Tok::EqEq},
                                   {"!=", Tok::Ne}, {"&&", Tok::AndAnd}, {"||", Tok::OrOr}};
    for (const auto& t : kTwo) {
      if (two == t.text) {
        advance(2);
        return {t.kind, std::string(t.text), loc};
      }
    }
    char c = src_[pos_];
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case ';': kind = Tok::Semi; break;
      case ',': kind = Tok::Comma; break;
      case '=': kind = Tok::Assign; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '%': kind = Tok::Percent; break;
      case '<': kind = Tok::Lt; break;
      case '>': kind = Tok::Gt; break;
      case '!': kind = Tok::Bang; break;
      default:
        throw ParseError(loc, std::string("unexpected character '") + c + "'");
    }
    advance();
    return {kind, std::string(1, c), loc};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::int64_t literal_value(const std::string& digits) {
  if (digits.size() > 12) return kLiteralClamp;
  return std::stoll(digits);
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Func f = function();
    expect(Tok::End, "end of input");
    check_well_formed(f);
    return Program{std::move(f)};
  }

  IExprPtr whole_iexpr() {
    auto e = iexpr();
    expect(Tok::End, "end of input");
    return e;
  }

  BExprPtr whole_bexpr() {
    auto b = bexpr();
    expect(Tok::End, "end of input");
    return b;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && peek().text == kw; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    const auto& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.loc, "expected " + what + ", found " + found);
  }

  const Token& expect(Tok k, const std::string& what) {
    if (!at(k)) fail(what);
    return next();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("'" + std::string(kw) + "'");
    next();
  }

  std::string identifier(const std::string& what) {
    const auto& t = expect(Tok::Ident, what);
    if (is_reserved(t.text)) throw ParseError(t.loc, "'" + t.text + "' is reserved");
    return t.text;
  }

  // int NAME '(' params ')' annotations block
  Func function() {
    Func f;
    f.loc = peek().loc;
    expect_keyword("int");
    f.name = identifier("function name");
    expect(Tok::LParen, "'('");
    if (at_keyword("void") && peek(1).kind == Tok::RParen) {
      next();
    } else if (!at(Tok::RParen)) {
      for (;;) {
        expect_keyword("int");
        f.params.push_back(identifier("parameter name"));
        if (!at(Tok::Comma)) break;
        next();
      }
    }
    expect(Tok::RParen, "')'");
    f.pre = annotation("requires");
    f.post = annotation("ensures");
    if (at(Tok::Annot)) throw ParseError(peek().loc, "unexpected annotation");
    f.body = block();
    return f;
  }

  BExprPtr annotation(std::string_view keyword) {
    if (!at(Tok::Annot)) fail("'//@ " + std::string(keyword) + "' annotation");
    next();
    expect_keyword(keyword);
    auto b = bexpr();
    expect(Tok::Semi, "';' after annotation");
    return b;
  }

  // '{' items '}' folded into a single statement; a declaration scopes over
  // the rest of the block.
  StmtPtr block() {
    SourceLoc loc = expect(Tok::LBrace, "'{'").loc;
    std::vector<Item> items;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail("'}'");
      items.push_back(item());
    }
    next();
    return fold(items, 0, loc);
  }

  struct Item {
    bool is_decl = false;
    std::string name;
    IExprPtr init;
    StmtPtr stmt;
    SourceLoc loc;
  };

  StmtPtr fold(const std::vector<Item>& items, std::size_t i, SourceLoc block_loc) const {
    if (i == items.size()) return build::skip(block_loc);
    const auto& it = items[i];
    if (it.is_decl) {
      SourceLoc rest_loc = i + 1 < items.size() ? items[i + 1].loc : block_loc;
      return build::let(it.name, it.init, fold(items, i + 1, rest_loc), it.loc);
    }
    if (i + 1 == items.size()) return it.stmt;
    return build::seq(it.stmt, fold(items, i + 1, items[i + 1].loc), it.loc);
  }

  Item item() {
    SourceLoc loc = peek().loc;
    if (at_keyword("int")) {
      next();
      Item it;
      it.is_decl = true;
      it.loc = loc;
      it.name = identifier("variable name");
      expect(Tok::Assign, "'=' (declarations must be initialized)");
      it.init = iexpr();
      expect(Tok::Semi, "';'");
      return it;
    }
    Item it;
    it.loc = loc;
    it.stmt = statement();
    return it;
  }

  StmtPtr statement() {
    SourceLoc loc = peek().loc;
    if (at(Tok::Annot)) throw ParseError(loc, "annotation is not allowed here");
    if (at(Tok::LBrace)) return block();
    if (at(Tok::Semi)) {
      next();
      return build::skip(loc);
    }
    if (at_keyword("int")) throw ParseError(loc, "declaration is not allowed here; wrap it in a block");
    if (at_keyword("if")) {
      next();
      expect(Tok::LParen, "'('");
      auto c = bexpr();
      expect(Tok::RParen, "')'");
      auto t = statement();
      StmtPtr e = build::skip(loc);
      if (at_keyword("else")) {
        next();
        e = statement();
      }
      return build::if_(c, t, e, loc);
    }
    if (at_keyword("while")) {
      next();
      expect(Tok::LParen, "'('");
      auto c = bexpr();
      expect(Tok::RParen, "')'");
      if (!at(Tok::Annot)) fail("loop invariant annotation '//@ invariant ...;'");
      auto inv = annotation("invariant");
      auto body = statement();
      return build::while_(c, inv, body, loc);
    }
    if (at_keyword("return")) {
      next();
      auto e = iexpr();
      expect(Tok::Semi, "';'");
      return build::ret(e, loc);
    }
    if (at(Tok::Ident) && peek(1).kind == Tok::Assign) {
      auto name = identifier("variable name");
      next();
      auto e = iexpr();
      expect(Tok::Semi, "';'");
      return build::assign(name, e, loc);
    }
    fail("statement");
  }

  // Boolean expressions: || < && < ! < comparison.
  BExprPtr bexpr() {
    auto lhs = band();
    while (at(Tok::OrOr)) {
      SourceLoc loc = next().loc;
      lhs = build::logic(LogicOp::Or, lhs, band(), loc);
    }
    return lhs;
  }

  BExprPtr band() {
    auto lhs = bunary();
    while (at(Tok::AndAnd)) {
      SourceLoc loc = next().loc;
      lhs = build::logic(LogicOp::And, lhs, bunary(), loc);
    }
    return lhs;
  }

  BExprPtr bunary() {
    if (at(Tok::Bang)) {
      SourceLoc loc = next().loc;
      return build::lnot(bunary(), loc);
    }
    return bprimary();
  }

  static bool continues_arith_or_cmp(Tok k) {
    switch (k) {
      case Tok::Plus: case Tok::Minus: case Tok::Star: case Tok::Slash: case Tok::Percent:
      case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge: case Tok::EqEq: case Tok::Ne:
        return true;
      default:
        return false;
    }
  }

  BExprPtr bprimary() {
    SourceLoc loc = peek().loc;
    if (at_keyword("true") || at_keyword("false")) {
      bool v = peek().text == "true";
      next();
      return build::boolean(v, loc);
    }
    if (at(Tok::LParen)) {
      // Either a parenthesized boolean or a comparison whose left operand
      // starts with '('.
      std::size_t save = pos_;
      try {
        next();
        auto inner = bexpr();
        expect(Tok::RParen, "')'");
        if (!continues_arith_or_cmp(peek().kind)) return inner;
      } catch (const ParseError&) {
      }
      pos_ = save;
    }
    auto lhs = iexpr();
    std::optional<CmpOp> op;
    switch (peek().kind) {
      case Tok::EqEq: op = CmpOp::Eq; break;
      case Tok::Ne: op = CmpOp::Ne; break;
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      case Tok::Ge: op = CmpOp::Ge; break;
      default: fail("comparison operator");
    }
    next();
    auto rhs = iexpr();
    return build::cmp(*op, lhs, rhs, loc);
  }

  IExprPtr iexpr() {
    auto lhs = term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const auto& t = next();
      lhs = build::arith(t.kind == Tok::Plus ? ArithOp::Add : ArithOp::Sub, lhs, term(), t.loc);
    }
    return lhs;
  }

  IExprPtr term() {
    auto lhs = unary();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      const auto& t = next();
      ArithOp op = t.kind == Tok::Star ? ArithOp::Mul : t.kind == Tok::Slash ? ArithOp::Div : ArithOp::Mod;
      lhs = build::arith(op, lhs, unary(), t.loc);
    }
    return lhs;
  }

  IExprPtr unary() {
    if (at(Tok::Minus)) {
      SourceLoc loc = next().loc;
      if (at(Tok::Number)) {
        // `-N` is a single negative literal, so INT_MIN is writable.
        auto v = -literal_value(next().text);
        if (!in_int_range(v)) throw ParseError(loc, "integer literal is outside the int range");
        return build::lit(v, loc);
      }
      return build::neg(unary(), loc);
    }
    return primary();
  }

  IExprPtr primary() {
    SourceLoc loc = peek().loc;
    if (at(Tok::Number)) {
      auto v = literal_value(next().text);
      if (!in_int_range(v)) throw ParseError(loc, "integer literal is outside the int range");
      return build::lit(v, loc);
    }
    if (at(Tok::Ident)) {
      const auto& t = next();
      if (is_reserved(t.text) && t.text != kResultName) {
        throw ParseError(loc, "'" + t.text + "' is not an integer expression");
      }
      return build::var(t.text, loc);
    }
    if (at(Tok::LParen)) {
      next();
      auto e = iexpr();
      expect(Tok::RParen, "')'");
      return e;
    }
    fail("integer expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse_program(std::string_view source) { return Parser(Lexer(source).run()).program(); }

IExprPtr parse_iexpr(std::string_view source) { return Parser(Lexer(source).run()).whole_iexpr(); }

BExprPtr parse_bexpr(std::string_view source) { return Parser(Lexer(source).run()).whole_bexpr(); }

}  // namespace certivex
