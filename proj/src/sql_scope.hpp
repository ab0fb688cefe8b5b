#pragma once

// Name resolution shared by the binder (strict) and the EM canonicalizer
// (tolerant). Internal to the library.

#include <string>
#include <vector>

#include "teql/sql.hpp"

namespace teql::sql::detail {

struct ScopeEntry {
  std::string name;   // lowercase table name, empty for a derived table
  std::string alias;  // lowercase alias, may be empty
  int table = -1;     // schema index; -1 when unknown or derived
  bool derived = false;
};

using Scope = std::vector<ScopeEntry>;

struct Resolution {
  bool ok = true;
  int table = -1;
  int column = -1;        // 0 for star
  std::string qualified;  // "table.column" lowercase, "*" or "table.*"
  std::string error;
};

/// Builds the scope of one FROM clause. With `strict`, unknown tables throw
/// BindError; otherwise they are kept by name.
Scope make_scope(const FromClause& from, const Schema* schema, bool strict);

/// Resolves against `chain`, innermost scope last.
Resolution resolve(const ColumnRef& ref, const std::vector<Scope>& chain, const Schema* schema);

}  // namespace teql::sql::detail
