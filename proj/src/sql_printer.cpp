#include <sstream>

#include "teql/sql.hpp"
#include "teql/util.hpp"

namespace teql::sql {

namespace {

using nlohmann::ordered_json;

std::string print_ref(const ColumnRef& ref) {
  return ref.qualifier.empty() ? ref.column : ref.qualifier + "." + ref.column;
}

std::string print_unit(const ColUnit& unit) {
  std::string inner = (unit.distinct ? "DISTINCT " : "") + print_ref(unit.col);
  if (unit.agg == Agg::None) return inner;
  return to_upper(to_string(unit.agg)) + "(" + inner + ")";
}

std::string print_literal(const Literal& lit) {
  if (!lit.is_string) return lit.text;
  std::string out = "'";
  for (char c : lit.text) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  return out + "'";
}

std::string print_operand(const Operand& op) {
  if (const auto* lit = std::get_if<Literal>(&op)) return print_literal(*lit);
  if (const auto* unit = std::get_if<ColUnit>(&op)) return print_unit(*unit);
  return "(" + to_sql(*std::get<Box<Query>>(op)) + ")";
}

std::string print_condition(const Condition& c, bool nested) {
  if (c.kind == Condition::Kind::Atom) {
    const Predicate& p = *c.atom;
    std::string out = print_unit(p.lhs) + " " + std::string(to_string(p.op)) + " " + print_operand(p.rhs);
    if (p.rhs2) out += " AND " + print_operand(*p.rhs2);
    return out;
  }
  const char* sep = c.kind == Condition::Kind::And ? " AND " : " OR ";
  std::string out;
  for (std::size_t i = 0; i < c.children.size(); ++i) {
    if (i) out += sep;
    out += print_condition(c.children[i], true);
  }
  return nested ? "(" + out + ")" : out;
}

ordered_json ref_json(const ColumnRef& ref) {
  return ordered_json{{"qualifier", ref.qualifier}, {"column", ref.column}};
}

ordered_json unit_json(const ColUnit& unit) {
  return ordered_json{{"agg", std::string(to_string(unit.agg))}, {"distinct", unit.distinct}, {"col", ref_json(unit.col)}};
}

ordered_json operand_json(const Operand& op) {
  if (const auto* lit = std::get_if<Literal>(&op)) {
    return ordered_json{{"literal", lit->text}, {"is_string", lit->is_string}};
  }
  if (const auto* unit = std::get_if<ColUnit>(&op)) return ordered_json{{"column", unit_json(*unit)}};
  return ordered_json{{"subquery", to_json(*std::get<Box<Query>>(op))}};
}

ordered_json condition_json(const Condition& c) {
  if (c.kind == Condition::Kind::Atom) {
    const Predicate& p = *c.atom;
    ordered_json j{{"op", std::string(to_string(p.op))}, {"lhs", unit_json(p.lhs)}, {"rhs", operand_json(p.rhs)}};
    if (p.rhs2) j["rhs2"] = operand_json(*p.rhs2);
    return j;
  }
  ordered_json children = ordered_json::array();
  for (const auto& child : c.children) children.push_back(condition_json(child));
  return ordered_json{{c.kind == Condition::Kind::And ? "and" : "or", std::move(children)}};
}

}  // namespace

std::string to_sql(const Query& q) {
  std::ostringstream out;
  out << "SELECT ";
  if (q.select.distinct) out << "DISTINCT ";
  for (std::size_t i = 0; i < q.select.items.size(); ++i) {
    if (i) out << ", ";
    out << print_unit(q.select.items[i]);
  }
  out << " FROM ";
  // Join conditions print after the last table; the parser accepts ON
  // after any JOIN, so the AST round-trips.
  for (std::size_t i = 0; i < q.from.tables.size(); ++i) {
    const TableRef& t = q.from.tables[i];
    if (i) out << " JOIN ";
    if (t.subquery) out << "(" << to_sql(*t.subquery) << ")";
    else out << t.name;
    if (!t.alias.empty()) out << " AS " << t.alias;
  }
  for (std::size_t i = 0; i < q.from.joins.size(); ++i) {
    out << (i ? " AND " : " ON ") << print_ref(q.from.joins[i].left) << " = " << print_ref(q.from.joins[i].right);
  }
  if (q.where) out << " WHERE " << print_condition(*q.where, false);
  if (!q.group_by.empty()) {
    out << " GROUP BY ";
    for (std::size_t i = 0; i < q.group_by.size(); ++i) out << (i ? ", " : "") << print_ref(q.group_by[i]);
  }
  if (q.having) out << " HAVING " << print_condition(*q.having, false);
  if (!q.order_by.empty()) {
    out << " ORDER BY ";
    for (std::size_t i = 0; i < q.order_by.size(); ++i) {
      out << (i ? ", " : "") << print_unit(q.order_by[i].key) << (q.order_by[i].descending ? " DESC" : " ASC");
    }
  }
  if (q.limit) out << " LIMIT " << *q.limit;
  if (q.set_op) out << " " << to_string(q.set_op->kind) << " " << to_sql(*q.set_op->right);
  return out.str();
}

ordered_json to_json(const Query& q) {
  ordered_json j;
  ordered_json items = ordered_json::array();
  for (const auto& item : q.select.items) items.push_back(unit_json(item));
  j["select"] = ordered_json{{"distinct", q.select.distinct}, {"items", std::move(items)}};
  ordered_json tables = ordered_json::array();
  for (const auto& t : q.from.tables) {
    ordered_json tj{{"name", t.name}, {"alias", t.alias}};
    if (t.subquery) tj["subquery"] = to_json(*t.subquery);
    tables.push_back(std::move(tj));
  }
  ordered_json joins = ordered_json::array();
  for (const auto& jc : q.from.joins) joins.push_back(ordered_json::array({ref_json(jc.left), ref_json(jc.right)}));
  j["from"] = ordered_json{{"tables", std::move(tables)}, {"join_conditions", std::move(joins)}};
  j["where"] = q.where ? condition_json(*q.where) : ordered_json();
  ordered_json group = ordered_json::array();
  for (const auto& g : q.group_by) group.push_back(ref_json(g));
  j["group_by"] = std::move(group);
  j["having"] = q.having ? condition_json(*q.having) : ordered_json();
  ordered_json order = ordered_json::array();
  for (const auto& k : q.order_by) {
    order.push_back(ordered_json{{"key", unit_json(k.key)}, {"direction", k.descending ? "DESC" : "ASC"}});
  }
  j["order_by"] = std::move(order);
  j["limit"] = q.limit ? ordered_json(*q.limit) : ordered_json();
  if (q.set_op) {
    j["set_op"] = ordered_json{{"kind", std::string(to_string(q.set_op->kind))}, {"right", to_json(*q.set_op->right)}};
  } else {
    j["set_op"] = ordered_json();
  }
  return j;
}

}  // namespace teql::sql
