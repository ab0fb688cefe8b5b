#include <algorithm>

#include "sql_scope.hpp"
#include "teql/util.hpp"

namespace teql::sql {

namespace {

using detail::Scope;
using nlohmann::json;

std::string dump_list(std::vector<std::string> items, bool sort, bool unique) {
  if (sort) std::sort(items.begin(), items.end());
  if (unique) items.erase(std::unique(items.begin(), items.end()), items.end());
  return json(items).dump();
}

class Canonicalizer {
 public:
  Canonicalizer(const Schema* schema, const MatchOptions& options) : schema_(schema), options_(options) {}

  CanonicalQuery run(const Query& q, std::vector<Scope> chain) {
    CanonicalQuery out;
    Scope scope = detail::make_scope(q.from, schema_, false);
    std::vector<std::string> tables;
    for (const TableRef& t : q.from.tables) {
      tables.push_back(t.subquery ? "(" + run(*t.subquery, chain).to_string() + ")" : to_lower(t.name));
    }
    chain.push_back(scope);

    std::vector<std::string> joins;
    for (const JoinCondition& jc : q.from.joins) {
      std::string a = name(jc.left, chain);
      std::string b = name(jc.right, chain);
      if (b < a) std::swap(a, b);
      joins.push_back(a + "=" + b);
    }
    std::sort(tables.begin(), tables.end());
    std::sort(joins.begin(), joins.end());
    joins.erase(std::unique(joins.begin(), joins.end()), joins.end());
    out.from = json{{"tables", tables}, {"joins", joins}}.dump();

    std::vector<std::string> items;
    for (const ColUnit& item : q.select.items) items.push_back(unit(item, chain));
    out.select = (q.select.distinct ? "distinct:" : "") + dump_list(std::move(items), true, false);

    out.where = q.where ? condition(*q.where, chain) : "";
    std::vector<std::string> group;
    for (const ColumnRef& g : q.group_by) group.push_back(name(g, chain));
    out.group_by = dump_list(std::move(group), true, true);
    out.having = q.having ? condition(*q.having, chain) : "";
    std::vector<std::string> order;
    for (const OrderKey& k : q.order_by) order.push_back(unit(k.key, chain) + (k.descending ? " desc" : " asc"));
    out.order_by = dump_list(std::move(order), false, false);
    out.limit = q.limit ? std::to_string(*q.limit) : "";
    chain.pop_back();
    if (q.set_op) out.set_op = std::string(to_string(q.set_op->kind)) + ":" + run(*q.set_op->right, chain).to_string();
    return out;
  }

 private:
  std::string name(const ColumnRef& ref, const std::vector<Scope>& chain) {
    auto r = detail::resolve(ref, chain, schema_);
    if (!r.ok && ref.qualifier.empty() && chain.back().size() == 1 && !chain.back()[0].derived) {
      return chain.back()[0].name + "." + to_lower(ref.column);
    }
    return r.qualified;
  }

  std::string unit(const ColUnit& u, const std::vector<Scope>& chain) {
    std::string inner = (u.distinct ? "distinct " : "") + name(u.col, chain);
    if (u.agg == Agg::None) return inner;
    return std::string(to_string(u.agg)) + "(" + inner + ")";
  }

  std::string operand(const Operand& op, const std::vector<Scope>& chain) {
    if (const auto* lit = std::get_if<Literal>(&op)) {
      if (options_.value_insensitive) return "value";
      return (lit->is_string ? "s:" : "n:") + lit->text;
    }
    if (const auto* u = std::get_if<ColUnit>(&op)) return "col:" + unit(*u, chain);
    return "(" + run(*std::get<Box<Query>>(op), chain).to_string() + ")";
  }

  void flatten(const Condition& c, Condition::Kind kind, std::vector<const Condition*>& out) {
    if (c.kind == kind) {
      for (const auto& child : c.children) flatten(child, kind, out);
    } else {
      out.push_back(&c);
    }
  }

  std::string condition(const Condition& c, const std::vector<Scope>& chain) {
    if (c.kind == Condition::Kind::Atom) {
      const Predicate& p = *c.atom;
      std::vector<std::string> parts{unit(p.lhs, chain), std::string(to_string(p.op)), operand(p.rhs, chain)};
      if (p.rhs2) parts.push_back(operand(*p.rhs2, chain));
      return json(parts).dump();
    }
    std::vector<const Condition*> flat;
    flatten(c, c.kind, flat);
    std::vector<std::string> parts;
    for (const Condition* child : flat) parts.push_back(condition(*child, chain));
    // AND siblings form a multiset; OR subtrees stay ordered.
    if (c.kind == Condition::Kind::And) return "and" + dump_list(std::move(parts), true, false);
    return "or" + dump_list(std::move(parts), false, false);
  }

  const Schema* schema_;
  MatchOptions options_;
};

}  // namespace

std::string CanonicalQuery::to_string() const {
  return json::array({select, from, where, group_by, having, order_by, limit, set_op}).dump();
}

CanonicalQuery canonicalize(const Query& query, const Schema* schema, const MatchOptions& options) {
  Canonicalizer c(schema, options);
  return c.run(query, {});
}

MatchResult compare_canonical(const CanonicalQuery& a, const CanonicalQuery& b) {
  const std::pair<const char*, std::string CanonicalQuery::*> clauses[] = {
      {"select", &CanonicalQuery::select},     {"from", &CanonicalQuery::from},
      {"where", &CanonicalQuery::where},       {"group_by", &CanonicalQuery::group_by},
      {"having", &CanonicalQuery::having},     {"order_by", &CanonicalQuery::order_by},
      {"limit", &CanonicalQuery::limit},       {"set_op", &CanonicalQuery::set_op}};
  for (const auto& [label, member] : clauses) {
    if (a.*member != b.*member) return MatchResult{false, label};
  }
  return MatchResult{};
}

bool exact_set_match(const Query& a, const Query& b, const MatchOptions& options) {
  return compare_canonical(canonicalize(a, nullptr, options), canonicalize(b, nullptr, options)).match;
}

bool exact_set_match(const Query& a, const Schema* schema_a, const Query& b, const Schema* schema_b,
                     const MatchOptions& options) {
  return compare_canonical(canonicalize(a, schema_a, options), canonicalize(b, schema_b, options)).match;
}

}  // namespace teql::sql
