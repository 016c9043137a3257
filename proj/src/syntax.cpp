#include "shiq/syntax.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

namespace shiq {

namespace {

enum class TokKind : std::uint8_t {
  Ident,
  Variable,  // ?name
  Number,
  LParen,
  RParen,
  Comma,
  Dot,
  Neq,  // !=
  Leq,  // <=
  End,
};

struct Token {
  TokKind kind;
  std::string text;
  std::uint64_t number = 0;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t = next_token();
      bool end = t.kind == TokKind::End;
      out.push_back(std::move(t));
      if (end) return out;
    }
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  SourceSpan here() const { return SourceSpan{line_, col_, pos_, pos_}; }

  Token next_token() {
    SourceSpan span = here();
    if (pos_ >= text_.size()) {
      span.end = span.begin;
      return {TokKind::End, "", 0, span};
    }
    char c = text_[pos_];
    auto single = [&](TokKind k) {
      advance();
      span.end = pos_;
      return Token{k, std::string(1, c), 0, span};
    };
    switch (c) {
      case '(': return single(TokKind::LParen);
      case ')': return single(TokKind::RParen);
      case ',': return single(TokKind::Comma);
      case '.': return single(TokKind::Dot);
      case '!':
        advance();
        if (pos_ < text_.size() && text_[pos_] == '=') {
          advance();
          span.end = pos_;
          return {TokKind::Neq, "!=", 0, span};
        }
        span.end = pos_;
        throw ParseError(span, "expected '=' after '!'");
      case '<':
        advance();
        if (pos_ < text_.size() && text_[pos_] == '=') {
          advance();
          span.end = pos_;
          return {TokKind::Leq, "<=", 0, span};
        }
        span.end = pos_;
        throw ParseError(span, "expected '=' after '<'");
      case '?': {
        advance();
        std::string name = lex_ident_tail(span);
        span.end = pos_;
        return {TokKind::Variable, name, 0, span};
      }
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::uint64_t value = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        value = value * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
        if (value > 1000000) throw ParseError(span, "number too large");
        advance();
      }
      span.end = pos_;
      return {TokKind::Number, "", value, span};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = lex_ident_tail(span);
      span.end = pos_;
      if (!name.empty() && name[0] == '_') {
        throw ParseError(span, "identifiers starting with '_' are reserved");
      }
      return {TokKind::Ident, name, 0, span};
    }
    span.end = pos_ + 1;
    throw ParseError(span, std::string("unexpected character '") + c + "'");
  }

  std::string lex_ident_tail(const SourceSpan& start) {
    std::string name;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        name += c;
        advance();
      } else {
        break;
      }
    }
    if (name.empty()) throw ParseError(start, "expected an identifier");
    return name;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(Lexer(text).run()) {}

  KnowledgeBase parse_kb(bool validate) {
    KnowledgeBase kb;
    std::vector<SourceSpan> abox_spans;
    std::vector<SourceSpan> tbox_spans;
    SourceSpan rbox_span = peek().span;
    bool saw_rbox = false;
    while (peek().kind != TokKind::End) {
      const Token& head = expect(TokKind::Ident, "a statement keyword");
      SourceSpan stmt_span = head.span;
      if (head.text == "trans") {
        Role r = parse_role();
        if (r.inverted) {
          throw ParseError(stmt_span, "transitive declarations take a role name, not an inverse");
        }
        kb.rbox().add_transitive(r.name);
        if (!saw_rbox) {
          rbox_span = stmt_span;
          saw_rbox = true;
        }
      } else if (head.text == "role") {
        Role sub = parse_role();
        expect(TokKind::Leq, "'<=' in role inclusion");
        Role super = parse_role();
        kb.rbox().add_inclusion(sub, super);
        if (!saw_rbox) {
          rbox_span = stmt_span;
          saw_rbox = true;
        }
      } else if (head.text == "axiom") {
        Concept lhs = parse_concept();
        expect(TokKind::Leq, "'<=' in concept inclusion");
        Concept rhs = parse_concept();
        kb.add_gci(lhs, rhs);
        tbox_spans.push_back(stmt_span);
      } else if (head.text == "distinguished") {
        kb.add_distinguished(expect(TokKind::Ident, "a concept name").text);
      } else if (head.text == "assert") {
        parse_assertion(kb);
        abox_spans.push_back(stmt_span);
      } else {
        throw ParseError(stmt_span, "unknown statement '" + head.text + "'");
      }
      expect(TokKind::Dot, "'.' terminating the statement");
    }
    if (!validate) return kb;
    for (const ValidationIssue& issue : validate_kb(kb)) {
      SourceSpan where = rbox_span;
      switch (issue.where) {
        case ValidationIssue::Where::RBox:
          break;
        case ValidationIssue::Where::TBox:
          if (issue.index < tbox_spans.size()) where = tbox_spans[issue.index];
          break;
        case ValidationIssue::Where::ABox:
          if (issue.index < abox_spans.size()) where = abox_spans[issue.index];
          break;
        case ValidationIssue::Where::General:
          where = SourceSpan{1, 1, 0, 0};
          break;
      }
      throw ParseError(where, issue.message);
    }
    return kb;
  }

  Query parse_query(const KnowledgeBase* kb) {
    Query q;
    for (;;) {
      const Token& pred = expect(TokKind::Ident, "a predicate name");
      expect(TokKind::LParen, "'('");
      std::vector<QueryTerm> terms;
      terms.push_back(parse_term());
      while (peek().kind == TokKind::Comma) {
        next();
        terms.push_back(parse_term());
      }
      expect(TokKind::RParen, "')'");
      if (terms.size() > 2) {
        throw ParseError(pred.span, "atom " + pred.text + " has more than two arguments");
      }
      if (kb) {
        bool is_role = false;
        for (const Role& r : occurring_roles(*kb)) {
          if (r.name == pred.text) {
            is_role = true;
            break;
          }
        }
        if (is_role && terms.size() != 2) {
          throw ParseError(pred.span, "role atom " + pred.text + " requires two arguments");
        }
        if (!is_role && terms.size() != 1) {
          throw ParseError(pred.span, "concept atom " + pred.text + " requires one argument");
        }
      }
      QueryAtom atom;
      atom.pred = pred.text;
      atom.t0 = terms[0];
      if (terms.size() == 2) {
        atom.kind = QueryAtom::Kind::Role;
        atom.t1 = terms[1];
      } else {
        atom.kind = QueryAtom::Kind::Concept;
      }
      q.add_atom(atom);
      if (peek().kind == TokKind::Comma) {
        next();
        continue;
      }
      break;
    }
    if (peek().kind == TokKind::Dot) next();
    expect(TokKind::End, "end of query");
    return q;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  const Token& expect(TokKind kind, const std::string& what) {
    if (peek().kind != kind) {
      throw ParseError(peek().span, "expected " + what);
    }
    return next();
  }

  QueryTerm parse_term() {
    const Token& t = peek();
    if (t.kind == TokKind::Ident) {
      next();
      return QueryTerm{false, t.text};
    }
    if (t.kind == TokKind::Variable) {
      next();
      return QueryTerm{true, t.text};
    }
    throw ParseError(t.span, "expected a constant or ?variable");
  }

  Role parse_role() {
    if (peek().kind == TokKind::Ident) {
      return Role{next().text, false};
    }
    expect(TokKind::LParen, "a role name or (inv R)");
    const Token& head = expect(TokKind::Ident, "'inv'");
    if (head.text != "inv") throw ParseError(head.span, "expected 'inv'");
    Role inner{expect(TokKind::Ident, "a role name").text, false};
    expect(TokKind::RParen, "')'");
    return inner.inverse();
  }

  Concept parse_concept() {
    const Token& t = peek();
    if (t.kind == TokKind::Ident) {
      next();
      return Concept::atom(t.text);
    }
    expect(TokKind::LParen, "a concept name or '('");
    const Token& head = expect(TokKind::Ident, "a concept constructor");
    Concept out = parse_concept_body(head);
    expect(TokKind::RParen, "')'");
    return out;
  }

  Concept parse_concept_body(const Token& head) {
    if (head.text == "and" || head.text == "or") {
      Concept lhs = parse_concept();
      Concept rhs = parse_concept();
      return head.text == "and" ? Concept::conj(lhs, rhs) : Concept::disj(lhs, rhs);
    }
    if (head.text == "not") {
      return Concept::negation(parse_concept());
    }
    if (head.text == "all" || head.text == "some") {
      Role r = parse_role();
      Concept c = parse_concept();
      return head.text == "all" ? Concept::univ(r, c) : Concept::exist(r, c);
    }
    if (head.text == "atleast" || head.text == "atmost") {
      const Token& n = expect(TokKind::Number, "a non-negative count");
      Role r = parse_role();
      Concept c = parse_concept();
      return head.text == "atleast"
                 ? Concept::at_least(static_cast<std::uint32_t>(n.number), r, c)
                 : Concept::at_most(static_cast<std::uint32_t>(n.number), r, c);
    }
    throw ParseError(head.span, "unknown concept constructor '" + head.text + "'");
  }

  void parse_assertion(KnowledgeBase& kb) {
    if (peek().kind == TokKind::Ident) {
      const Token& name = next();
      if (peek().kind == TokKind::Neq) {
        next();
        const Token& other = expect(TokKind::Ident, "an individual name");
        kb.assert_distinct(name.text, other.text);
        return;
      }
      expect(TokKind::LParen, "'(' or '!='");
      const Token& first = expect(TokKind::Ident, "an individual name");
      if (peek().kind == TokKind::Comma) {
        next();
        const Token& second = expect(TokKind::Ident, "an individual name");
        expect(TokKind::RParen, "')'");
        kb.assert_role(first.text, Role{name.text, false}, second.text);
      } else {
        expect(TokKind::RParen, "')'");
        kb.assert_concept(first.text, Concept::atom(name.text));
      }
      return;
    }
    // Parenthesized head: an inverse role or a compound concept.
    expect(TokKind::LParen, "an assertion");
    const Token& head = expect(TokKind::Ident, "a constructor");
    if (head.text == "inv") {
      Role inner{expect(TokKind::Ident, "a role name").text, false};
      expect(TokKind::RParen, "')'");
      expect(TokKind::LParen, "'('");
      const Token& a = expect(TokKind::Ident, "an individual name");
      expect(TokKind::Comma, "','");
      const Token& b = expect(TokKind::Ident, "an individual name");
      expect(TokKind::RParen, "')'");
      kb.assert_role(a.text, inner.inverse(), b.text);
      return;
    }
    Concept c = parse_concept_body(head);
    expect(TokKind::RParen, "')'");
    expect(TokKind::LParen, "'('");
    const Token& a = expect(TokKind::Ident, "an individual name");
    expect(TokKind::RParen, "')'");
    kb.assert_concept(a.text, c);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

KnowledgeBase parse_kb(const std::string& text, bool validate) {
  return Parser(text).parse_kb(validate);
}

Query parse_query(const std::string& text, const KnowledgeBase* kb) {
  return Parser(text).parse_query(kb);
}

std::string render_kb(const KnowledgeBase& kb) {
  std::ostringstream os;
  for (const std::string& name : kb.rbox().transitive_names()) {
    os << "trans " << name << ".\n";
  }
  for (const auto& [sub, super] : kb.rbox().inclusions()) {
    os << "role " << sub.str() << " <= " << super.str() << ".\n";
  }
  for (const Gci& g : kb.tbox()) {
    os << "axiom " << g.lhs.str() << " <= " << g.rhs.str() << ".\n";
  }
  for (const std::string& name : kb.distinguished()) {
    os << "distinguished " << name << ".\n";
  }
  for (const Assertion& as : kb.abox()) {
    switch (as.kind) {
      case AssertionKind::Concept:
        os << "assert " << as.expr->str() << "(" << as.a << ").\n";
        break;
      case AssertionKind::Role:
        os << "assert " << as.role.str() << "(" << as.a << "," << as.b << ").\n";
        break;
      case AssertionKind::Inequality:
        os << "assert " << as.a << " != " << as.b << ".\n";
        break;
    }
  }
  return os.str();
}

std::string render_query(const Query& q) {
  std::ostringstream os;
  bool first = true;
  for (const QueryAtom& a : q.atoms()) {
    if (!first) os << ", ";
    os << a.str();
    first = false;
  }
  return os.str();
}

}  // namespace shiq
