#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "teql/schema.hpp"

namespace teql::sql {

/// Owning pointer with value semantics, for recursive AST members.
template <typename T>
class Box {
 public:
  Box() = default;
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  explicit operator bool() const { return static_cast<bool>(ptr_); }
  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) {
    if (!a.ptr_ || !b.ptr_) return !a.ptr_ && !b.ptr_;
    return *a.ptr_ == *b.ptr_;
  }

 private:
  std::unique_ptr<T> ptr_;
};

enum class Agg { None, Min, Max, Count, Sum, Avg };
enum class CmpOp { Eq, Ne, Gt, Lt, Ge, Le, Like, NotLike, In, NotIn, Between };
enum class SetKind { Union, Intersect, Except };

std::string_view to_string(Agg agg);
std::string_view to_string(CmpOp op);
std::string_view to_string(SetKind kind);

struct ColumnRef {
  std::string qualifier;  // table name or alias; empty when unqualified
  std::string column;     // "*" for the star column

  bool is_star() const { return column == "*"; }
  bool operator==(const ColumnRef&) const = default;
};

/// An optionally aggregated column, e.g. `count(DISTINCT t.name)`.
struct ColUnit {
  Agg agg = Agg::None;
  bool distinct = false;
  ColumnRef col;

  bool operator==(const ColUnit&) const = default;
};

struct Query;

struct Literal {
  bool is_string = false;
  std::string text;  // unquoted

  bool operator==(const Literal&) const = default;
};

using Operand = std::variant<Literal, ColUnit, Box<Query>>;

struct Predicate {
  ColUnit lhs;
  CmpOp op = CmpOp::Eq;
  Operand rhs;
  std::optional<Operand> rhs2;  // BETWEEN upper bound

  bool operator==(const Predicate&) const = default;
};

/// AND/OR tree over predicates. AND and OR nodes carry >= 2 children.
struct Condition {
  enum class Kind { Atom, And, Or };
  Kind kind = Kind::Atom;
  Box<Predicate> atom;
  std::vector<Condition> children;

  bool operator==(const Condition&) const = default;
};

struct TableRef {
  std::string name;  // empty for a subquery
  std::string alias;
  Box<Query> subquery;

  bool operator==(const TableRef&) const = default;
};

struct JoinCondition {
  ColumnRef left;
  ColumnRef right;

  bool operator==(const JoinCondition&) const = default;
};

struct FromClause {
  std::vector<TableRef> tables;
  std::vector<JoinCondition> joins;

  bool operator==(const FromClause&) const = default;
};

struct SelectClause {
  bool distinct = false;
  std::vector<ColUnit> items;

  bool operator==(const SelectClause&) const = default;
};

struct OrderKey {
  ColUnit key;
  bool descending = false;

  bool operator==(const OrderKey&) const = default;
};

struct SetOp {
  SetKind kind = SetKind::Union;
  Box<Query> right;

  bool operator==(const SetOp&) const = default;
};

/// AST for the Spider SQL subset.
struct Query {
  SelectClause select;
  FromClause from;
  std::optional<Condition> where;
  std::vector<ColumnRef> group_by;
  std::optional<Condition> having;
  std::vector<OrderKey> order_by;
  std::optional<std::int64_t> limit;
  std::optional<SetOp> set_op;

  bool operator==(const Query&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string expected, const std::string& message)
      : std::runtime_error(message), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class BindError : public std::runtime_error {
 public:
  BindError(std::string token, const std::string& message)
      : std::runtime_error(message), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// ---- parsing and printing ----

Query parse_sql(std::string_view text);
std::string to_sql(const Query& query);
nlohmann::ordered_json to_json(const Query& query);

// ---- binding ----

/// Schema elements referenced by a query, including nested subqueries.
struct UsageSet {
  std::set<int> used_tables;
  std::set<int> used_columns;  // star excluded
  std::set<ForeignKey> used_fk_pairs;
  std::set<int> star_tables;   // tables whose every column is projected via `*`

  /// True when `column` is referenced directly or via a star projection.
  bool protects_column(const Schema& schema, int column) const;
  bool protects_table(int table) const { return used_tables.count(table) > 0; }
};

/// Usage rendered as lowercase names, comparable across schema rewrites.
struct NamedUsage {
  std::set<std::string> tables;
  std::set<std::string> columns;
  std::set<std::string> star_tables;

  bool operator==(const NamedUsage&) const = default;
};

UsageSet bind_and_usage(const Query& query, const Schema& schema);
NamedUsage named_usage(const UsageSet& usage, const Schema& schema);

// ---- exact set match ----

struct MatchOptions {
  bool value_insensitive = true;
};

/// Clause-wise canonical form. Aliases resolved, intra-clause sets sorted.
struct CanonicalQuery {
  std::string select;
  std::string from;
  std::string where;
  std::string group_by;
  std::string having;
  std::string order_by;
  std::string limit;
  std::string set_op;

  std::string to_string() const;
  bool operator==(const CanonicalQuery&) const = default;
};

/// `schema` resolves unqualified columns when several tables are in scope;
/// without it such columns keep a "?" qualifier.
CanonicalQuery canonicalize(const Query& query, const Schema* schema = nullptr,
                            const MatchOptions& options = {});

struct MatchResult {
  bool match = true;
  std::string first_difference;  // clause name, empty on match
};

MatchResult compare_canonical(const CanonicalQuery& a, const CanonicalQuery& b);
bool exact_set_match(const Query& a, const Query& b, const MatchOptions& options = {});
bool exact_set_match(const Query& a, const Schema* schema_a, const Query& b, const Schema* schema_b,
                     const MatchOptions& options = {});

// ---- hardness ----

enum class Hardness { Easy, Medium, Hard, Extra };
std::string_view to_string(Hardness h);
inline constexpr std::string_view kHardnessRuleVersion = "spider-components-monotone/1";

struct ComponentCounts {
  int component1 = 0;
  int component2 = 0;
  int others = 0;
};

ComponentCounts count_components(const Query& query);
Hardness classify_counts(const ComponentCounts& counts);
Hardness classify_hardness(const Query& query);

}  // namespace teql::sql
