#include "sql_scope.hpp"
#include "teql/util.hpp"

namespace teql::sql {

namespace detail {

Scope make_scope(const FromClause& from, const Schema* schema, bool strict) {
  Scope scope;
  for (const TableRef& t : from.tables) {
    ScopeEntry e;
    e.alias = to_lower(t.alias);
    if (t.subquery) {
      e.derived = true;
    } else {
      e.name = to_lower(t.name);
      if (schema) {
        auto idx = schema->find_table(t.name);
        if (!idx && strict) throw BindError(t.name, "unknown table '" + t.name + "'");
        if (idx) e.table = *idx;
      }
    }
    scope.push_back(std::move(e));
  }
  return scope;
}

namespace {

const ScopeEntry* find_qualifier(const std::vector<Scope>& chain, const std::string& q) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    for (const ScopeEntry& e : *it) {
      if (!e.alias.empty() && e.alias == q) return &e;
    }
    for (const ScopeEntry& e : *it) {
      if (!e.derived && e.name == q) return &e;
    }
  }
  return nullptr;
}

}  // namespace

Resolution resolve(const ColumnRef& ref, const std::vector<Scope>& chain, const Schema* schema) {
  Resolution r;
  const std::string col = to_lower(ref.column);
  if (!ref.qualifier.empty()) {
    const std::string q = to_lower(ref.qualifier);
    const ScopeEntry* e = find_qualifier(chain, q);
    if (!e) {
      r.ok = false;
      r.error = "unknown table or alias '" + ref.qualifier + "'";
      r.qualified = q + "." + col;
      return r;
    }
    if (e->derived) {
      r.qualified = "derived." + col;
      return r;
    }
    r.table = e->table;
    if (ref.is_star()) {
      r.column = 0;
      r.qualified = e->name + ".*";
      return r;
    }
    r.qualified = e->name + "." + col;
    if (schema && e->table >= 0) {
      auto c = schema->find_column(e->table, ref.column);
      if (!c) {
        r.ok = false;
        r.error = "unknown column '" + ref.qualifier + "." + ref.column + "'";
        return r;
      }
      r.column = *c;
    } else if (schema) {
      r.ok = false;
      r.error = "unknown table '" + e->name + "'";
    }
    return r;
  }

  if (ref.is_star()) {
    r.column = 0;
    r.qualified = "*";
    return r;
  }

  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const Scope& scope = *it;
    if (schema) {
      const ScopeEntry* hit = nullptr;
      int hit_col = -1;
      int hits = 0;
      bool has_derived = false;
      for (const ScopeEntry& e : scope) {
        if (e.derived) {
          has_derived = true;
          continue;
        }
        if (e.table < 0) continue;
        if (auto c = schema->find_column(e.table, ref.column)) {
          ++hits;
          hit = &e;
          hit_col = *c;
        }
      }
      if (hits > 1) {
        r.ok = false;
        r.error = "ambiguous column '" + ref.column + "'";
        r.qualified = "?." + col;
        return r;
      }
      if (hits == 1) {
        r.table = hit->table;
        r.column = hit_col;
        r.qualified = hit->name + "." + col;
        return r;
      }
      if (has_derived) {
        r.qualified = "derived." + col;
        return r;
      }
    } else {
      if (scope.size() == 1) {
        r.qualified = (scope[0].derived ? std::string("derived") : scope[0].name) + "." + col;
        return r;
      }
      r.qualified = "?." + col;
      return r;
    }
  }
  r.ok = false;
  r.error = "unknown column '" + ref.column + "'";
  r.qualified = "?." + col;
  return r;
}

}  // namespace detail

namespace {

using detail::Scope;

class Binder {
 public:
  Binder(const Schema& schema) : schema_(schema) {}

  void bind(const Query& q, std::vector<Scope> chain) {
    for (const TableRef& t : q.from.tables) {
      if (t.subquery) bind(*t.subquery, chain);
    }
    Scope scope = detail::make_scope(q.from, &schema_, true);
    for (const auto& e : scope) {
      if (e.table >= 0) usage_.used_tables.insert(e.table);
    }
    chain.push_back(scope);

    for (const ColUnit& item : q.select.items) {
      if (item.col.is_star() && item.agg == Agg::None) {
        mark_star(item.col, chain);
      } else {
        use(item.col, chain);
      }
    }
    for (const JoinCondition& jc : q.from.joins) {
      const int a = use(jc.left, chain);
      const int b = use(jc.right, chain);
      for (const ForeignKey& fk : schema_.foreign_keys) {
        if ((fk.first == a && fk.second == b) || (fk.first == b && fk.second == a)) usage_.used_fk_pairs.insert(fk);
      }
    }
    if (q.where) bind_condition(*q.where, chain);
    for (const ColumnRef& g : q.group_by) use(g, chain);
    if (q.having) bind_condition(*q.having, chain);
    for (const OrderKey& k : q.order_by) use(k.key.col, chain);
    chain.pop_back();
    if (q.set_op) bind(*q.set_op->right, chain);
  }

  UsageSet take() { return std::move(usage_); }

 private:
  int use(const ColumnRef& ref, const std::vector<Scope>& chain) {
    auto r = detail::resolve(ref, chain, &schema_);
    if (!r.ok) throw BindError(ref.qualifier.empty() ? ref.column : ref.qualifier + "." + ref.column, r.error);
    if (r.column > 0) usage_.used_columns.insert(r.column);
    return r.column;
  }

  void mark_star(const ColumnRef& ref, const std::vector<Scope>& chain) {
    if (!ref.qualifier.empty()) {
      auto r = detail::resolve(ref, chain, &schema_);
      if (!r.ok) throw BindError(ref.qualifier + ".*", r.error);
      if (r.table >= 0) usage_.star_tables.insert(r.table);
      return;
    }
    for (const auto& e : chain.back()) {
      if (e.table >= 0) usage_.star_tables.insert(e.table);
    }
  }

  void bind_operand(const Operand& op, const std::vector<Scope>& chain) {
    if (const auto* unit = std::get_if<ColUnit>(&op)) {
      if (!unit->col.is_star()) use(unit->col, chain);
    } else if (const auto* sub = std::get_if<Box<Query>>(&op)) {
      bind(**sub, chain);
    }
  }

  void bind_condition(const Condition& c, const std::vector<Scope>& chain) {
    if (c.kind != Condition::Kind::Atom) {
      for (const auto& child : c.children) bind_condition(child, chain);
      return;
    }
    const Predicate& p = *c.atom;
    if (!p.lhs.col.is_star()) use(p.lhs.col, chain);
    bind_operand(p.rhs, chain);
    if (p.rhs2) bind_operand(*p.rhs2, chain);
  }

  const Schema& schema_;
  UsageSet usage_;
};

}  // namespace

bool UsageSet::protects_column(const Schema& schema, int column) const {
  if (used_columns.count(column)) return true;
  const int t = schema.columns.at(static_cast<std::size_t>(column)).table_index;
  return star_tables.count(t) > 0;
}

UsageSet bind_and_usage(const Query& query, const Schema& schema) {
  Binder binder(schema);
  binder.bind(query, {});
  return binder.take();
}

NamedUsage named_usage(const UsageSet& usage, const Schema& schema) {
  NamedUsage out;
  for (int t : usage.used_tables) out.tables.insert(to_lower(schema.tables.at(static_cast<std::size_t>(t)).original_name));
  for (int c : usage.used_columns) out.columns.insert(schema.qualified_name(c));
  for (int t : usage.star_tables) out.star_tables.insert(to_lower(schema.tables.at(static_cast<std::size_t>(t)).original_name));
  return out;
}

}  // namespace teql::sql
