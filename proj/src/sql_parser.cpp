#include <cctype>
#include <charconv>
#include <unordered_set>

#include "teql/sql.hpp"
#include "teql/util.hpp"

namespace teql::sql {

std::string_view to_string(Agg agg) {
  switch (agg) {
    case Agg::None: return "none";
    case Agg::Min: return "min";
    case Agg::Max: return "max";
    case Agg::Count: return "count";
    case Agg::Sum: return "sum";
    case Agg::Avg: return "avg";
  }
  return "none";
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Gt: return ">";
    case CmpOp::Lt: return "<";
    case CmpOp::Ge: return ">=";
    case CmpOp::Le: return "<=";
    case CmpOp::Like: return "LIKE";
    case CmpOp::NotLike: return "NOT LIKE";
    case CmpOp::In: return "IN";
    case CmpOp::NotIn: return "NOT IN";
    case CmpOp::Between: return "BETWEEN";
  }
  return "=";
}

std::string_view to_string(SetKind kind) {
  switch (kind) {
    case SetKind::Union: return "UNION";
    case SetKind::Intersect: return "INTERSECT";
    case SetKind::Except: return "EXCEPT";
  }
  return "UNION";
}

namespace {

enum class Tok { Ident, Number, String, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;   // identifiers keep source casing; strings are unquoted
  std::string upper;  // uppercase form for keyword tests
  std::size_t offset = 0;
};

const std::unordered_set<std::string>& keywords() {
  static const std::unordered_set<std::string> kw = {
      "SELECT", "FROM",   "WHERE", "GROUP",   "BY",        "HAVING", "ORDER", "LIMIT", "UNION",
      "INTERSECT", "EXCEPT", "JOIN",  "ON",      "AS",        "AND",    "OR",    "NOT",   "IN",
      "LIKE",   "BETWEEN", "DISTINCT", "ASC",  "DESC",      "INNER",  "LEFT",  "OUTER"};
  return kw;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.offset = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '`') {
      std::size_t j = s.find('`', i + 1);
      if (j == std::string_view::npos) throw ParseError(i, "`", "unterminated quoted identifier at byte " + std::to_string(i));
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i + 1, j - i - 1));
      i = j + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      t.kind = Tok::Number;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '\'' || c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < s.size()) {
        if (s[j] == c) {
          if (j + 1 < s.size() && s[j + 1] == c) {  // doubled quote escape
            value.push_back(c);
            j += 2;
            continue;
          }
          closed = true;
          break;
        }
        value.push_back(s[j++]);
      }
      if (!closed) throw ParseError(i, std::string(1, c), "unterminated string literal at byte " + std::to_string(i));
      t.kind = Tok::String;
      t.text = std::move(value);
      i = j + 1;
    } else {
      static const char* const two[] = {"!=", "<>", ">=", "<="};
      t.kind = Tok::Symbol;
      bool matched = false;
      for (const char* op : two) {
        if (s.substr(i, 2) == op) {
          t.text = op;
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("(),.*=<>;-").find(c) == std::string_view::npos) {
          throw ParseError(i, "token", "unexpected character '" + std::string(1, c) + "' at byte " + std::to_string(i));
        }
        t.text = std::string(1, c);
        ++i;
      }
    }
    t.upper = to_upper(t.text);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.offset = s.size();
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Query parse_all() {
    Query q = parse_query();
    if (peek_symbol(";")) advance();
    if (peek().kind != Tok::End) fail("end of query");
    return q;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  bool peek_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Ident && t.upper == kw;
  }
  bool peek_symbol(std::string_view sym) const {
    const Token& t = peek();
    return t.kind == Tok::Symbol && t.text == sym;
  }
  bool accept_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) return false;
    advance();
    return true;
  }
  bool accept_symbol(std::string_view sym) {
    if (!peek_symbol(sym)) return false;
    advance();
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail(std::string(kw));
  }
  void expect_symbol(std::string_view sym) {
    if (!accept_symbol(sym)) fail("'" + std::string(sym) + "'");
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.offset, expected,
                     "syntax error at byte " + std::to_string(t.offset) + ": expected " + expected + ", found " + found);
  }

  bool is_identifier(const Token& t) const { return t.kind == Tok::Ident && !keywords().count(t.upper); }

  std::string expect_identifier(const char* what) {
    if (!is_identifier(peek())) fail(what);
    return advance().text;
  }

  Query parse_query() {
    Query q = parse_select_core();
    std::optional<SetKind> kind;
    if (peek_keyword("UNION")) kind = SetKind::Union;
    else if (peek_keyword("INTERSECT")) kind = SetKind::Intersect;
    else if (peek_keyword("EXCEPT")) kind = SetKind::Except;
    if (kind) {
      advance();
      q.set_op = SetOp{*kind, Box<Query>(parse_query())};
    }
    return q;
  }

  Query parse_select_core() {
    Query q;
    expect_keyword("SELECT");
    q.select.distinct = accept_keyword("DISTINCT");
    do {
      q.select.items.push_back(parse_col_unit());
    } while (accept_symbol(","));
    expect_keyword("FROM");
    parse_from(q.from);
    if (accept_keyword("WHERE")) q.where = parse_condition();
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      do {
        q.group_by.push_back(parse_column_ref());
      } while (accept_symbol(","));
    }
    if (accept_keyword("HAVING")) q.having = parse_condition();
    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      do {
        OrderKey key;
        key.key = parse_col_unit();
        if (accept_keyword("DESC")) key.descending = true;
        else accept_keyword("ASC");
        q.order_by.push_back(std::move(key));
      } while (accept_symbol(","));
    }
    if (accept_keyword("LIMIT")) {
      const Token& t = peek();
      std::int64_t value = 0;
      if (t.kind != Tok::Number ||
          std::from_chars(t.text.data(), t.text.data() + t.text.size(), value).ptr != t.text.data() + t.text.size() ||
          value < 0) {
        fail("non-negative integer");
      }
      advance();
      q.limit = value;
    }
    return q;
  }

  void parse_from(FromClause& from) {
    from.tables.push_back(parse_table_item());
    while (true) {
      if (accept_symbol(",")) {
        from.tables.push_back(parse_table_item());
        continue;
      }
      accept_keyword("INNER");
      if (!accept_keyword("JOIN")) break;
      from.tables.push_back(parse_table_item());
      if (accept_keyword("ON")) {
        do {
          JoinCondition jc;
          jc.left = parse_column_ref();
          expect_symbol("=");
          jc.right = parse_column_ref();
          from.joins.push_back(std::move(jc));
        } while (accept_keyword("AND"));
      }
    }
  }

  TableRef parse_table_item() {
    TableRef ref;
    if (accept_symbol("(")) {
      ref.subquery = Box<Query>(parse_query());
      expect_symbol(")");
    } else {
      ref.name = expect_identifier("table name");
    }
    if (accept_keyword("AS")) {
      ref.alias = expect_identifier("alias");
    } else if (is_identifier(peek())) {
      ref.alias = advance().text;
    }
    return ref;
  }

  std::optional<Agg> peek_aggregate() const {
    const Token& t = peek();
    if (t.kind != Tok::Ident || peek(1).kind != Tok::Symbol || peek(1).text != "(") return std::nullopt;
    if (t.upper == "MIN") return Agg::Min;
    if (t.upper == "MAX") return Agg::Max;
    if (t.upper == "COUNT") return Agg::Count;
    if (t.upper == "SUM") return Agg::Sum;
    if (t.upper == "AVG") return Agg::Avg;
    return std::nullopt;
  }

  ColUnit parse_col_unit() {
    ColUnit unit;
    if (auto agg = peek_aggregate()) {
      advance();
      advance();  // (
      unit.agg = *agg;
      unit.distinct = accept_keyword("DISTINCT");
      unit.col = parse_column_ref();
      expect_symbol(")");
      return unit;
    }
    unit.distinct = accept_keyword("DISTINCT");
    unit.col = parse_column_ref();
    return unit;
  }

  ColumnRef parse_column_ref() {
    ColumnRef ref;
    if (accept_symbol("*")) {
      ref.column = "*";
      return ref;
    }
    std::string first = expect_identifier("column name");
    if (accept_symbol(".")) {
      ref.qualifier = std::move(first);
      if (accept_symbol("*")) ref.column = "*";
      else ref.column = expect_identifier("column name");
    } else {
      ref.column = std::move(first);
    }
    return ref;
  }

  Condition parse_condition() {
    Condition first = parse_and();
    if (!peek_keyword("OR")) return first;
    Condition node;
    node.kind = Condition::Kind::Or;
    node.children.push_back(std::move(first));
    while (accept_keyword("OR")) node.children.push_back(parse_and());
    return node;
  }

  Condition parse_and() {
    Condition first = parse_unary();
    if (!peek_keyword("AND")) return first;
    Condition node;
    node.kind = Condition::Kind::And;
    node.children.push_back(std::move(first));
    while (accept_keyword("AND")) node.children.push_back(parse_unary());
    return node;
  }

  Condition parse_unary() {
    if (peek_symbol("(") && !peek_keyword("SELECT", 1)) {
      advance();
      Condition inner = parse_condition();
      expect_symbol(")");
      return inner;
    }
    Condition atom;
    atom.kind = Condition::Kind::Atom;
    atom.atom = Box<Predicate>(parse_predicate());
    return atom;
  }

  Predicate parse_predicate() {
    Predicate p;
    p.lhs = parse_col_unit();
    const bool negated = accept_keyword("NOT");
    if (accept_keyword("IN")) {
      p.op = negated ? CmpOp::NotIn : CmpOp::In;
      expect_symbol("(");
      p.rhs = Box<Query>(parse_query());
      expect_symbol(")");
      return p;
    }
    if (accept_keyword("LIKE")) {
      p.op = negated ? CmpOp::NotLike : CmpOp::Like;
      p.rhs = parse_operand();
      return p;
    }
    if (negated) fail("IN or LIKE after NOT");
    if (accept_keyword("BETWEEN")) {
      p.op = CmpOp::Between;
      p.rhs = parse_operand();
      expect_keyword("AND");
      p.rhs2 = parse_operand();
      return p;
    }
    const Token& t = peek();
    if (t.kind != Tok::Symbol) fail("comparison operator");
    if (t.text == "=") p.op = CmpOp::Eq;
    else if (t.text == "!=" || t.text == "<>") p.op = CmpOp::Ne;
    else if (t.text == ">") p.op = CmpOp::Gt;
    else if (t.text == "<") p.op = CmpOp::Lt;
    else if (t.text == ">=") p.op = CmpOp::Ge;
    else if (t.text == "<=") p.op = CmpOp::Le;
    else fail("comparison operator");
    advance();
    p.rhs = parse_operand();
    return p;
  }

  Operand parse_operand() {
    if (accept_symbol("(")) {
      if (!peek_keyword("SELECT")) fail("SELECT");
      Query sub = parse_query();
      expect_symbol(")");
      return Box<Query>(std::move(sub));
    }
    const Token& t = peek();
    if (t.kind == Tok::String) {
      Literal lit{true, t.text};
      advance();
      return lit;
    }
    if (t.kind == Tok::Number) {
      Literal lit{false, t.text};
      advance();
      return lit;
    }
    if (t.kind == Tok::Symbol && t.text == "-" && peek(1).kind == Tok::Number) {
      advance();
      Literal lit{false, "-" + advance().text};
      return lit;
    }
    if (t.kind == Tok::Ident && !keywords().count(t.upper)) return parse_col_unit();
    fail("value, column or subquery");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Query parse_sql(std::string_view text) {
  if (trim(text).empty()) throw ParseError(0, "SELECT", "empty query");
  Parser parser(text);
  return parser.parse_all();
}

}  // namespace teql::sql
