#include <algorithm>

#include "teql/sql.hpp"

namespace teql::sql {

std::string_view to_string(Hardness h) {
  switch (h) {
    case Hardness::Easy: return "easy";
    case Hardness::Medium: return "medium";
    case Hardness::Hard: return "hard";
    case Hardness::Extra: return "extra";
  }
  return "extra";
}

namespace {

void visit_atoms(const Condition& c, const auto& fn) {
  if (c.kind == Condition::Kind::Atom) {
    fn(*c.atom);
    return;
  }
  for (const auto& child : c.children) visit_atoms(child, fn);
}

int count_or_connectors(const Condition& c) {
  if (c.kind == Condition::Kind::Atom) return 0;
  int n = c.kind == Condition::Kind::Or ? static_cast<int>(c.children.size()) - 1 : 0;
  for (const auto& child : c.children) n += count_or_connectors(child);
  return n;
}

int count_nested(const Query& q) {
  int n = q.set_op ? 1 : 0;
  for (const auto& t : q.from.tables) n += t.subquery ? 1 : 0;
  auto on_atom = [&](const Predicate& p) {
    if (std::holds_alternative<Box<Query>>(p.rhs)) ++n;
    if (p.rhs2 && std::holds_alternative<Box<Query>>(*p.rhs2)) ++n;
  };
  if (q.where) visit_atoms(*q.where, on_atom);
  if (q.having) visit_atoms(*q.having, on_atom);
  return n;
}

// Spider's easy/medium/hard/extra rule on raw component counts.
Hardness spider_rule(int c1, int c2, int others) {
  if (c1 <= 1 && others == 0 && c2 == 0) return Hardness::Easy;
  if ((others <= 2 && c1 <= 1 && c2 == 0) || (c1 <= 2 && others < 2 && c2 == 0)) return Hardness::Medium;
  if ((others > 2 && c1 <= 2 && c2 == 0) || (2 < c1 && c1 <= 3 && others <= 2 && c2 == 0) ||
      (c1 <= 1 && others == 0 && c2 <= 1)) {
    return Hardness::Hard;
  }
  return Hardness::Extra;
}

}  // namespace

ComponentCounts count_components(const Query& q) {
  ComponentCounts c;
  if (q.where) ++c.component1;
  if (!q.group_by.empty()) ++c.component1;
  if (!q.order_by.empty()) ++c.component1;
  if (q.limit) ++c.component1;
  if (!q.from.tables.empty()) c.component1 += static_cast<int>(q.from.tables.size()) - 1;
  int likes = 0;
  auto count_like = [&](const Predicate& p) {
    if (p.op == CmpOp::Like || p.op == CmpOp::NotLike) ++likes;
  };
  if (q.where) {
    c.component1 += count_or_connectors(*q.where);
    visit_atoms(*q.where, count_like);
  }
  if (q.having) {
    c.component1 += count_or_connectors(*q.having);
    visit_atoms(*q.having, count_like);
  }
  c.component1 += likes;

  c.component2 = count_nested(q);

  int aggs = 0;
  for (const auto& item : q.select.items) aggs += item.agg != Agg::None;
  int where_atoms = 0;
  if (q.where) {
    visit_atoms(*q.where, [&](const Predicate& p) {
      ++where_atoms;
      aggs += p.lhs.agg != Agg::None;
    });
  }
  for (const auto& k : q.order_by) aggs += k.key.agg != Agg::None;
  if (q.having) visit_atoms(*q.having, [&](const Predicate& p) { aggs += p.lhs.agg != Agg::None; });
  if (aggs > 1) ++c.others;
  if (q.select.items.size() > 1) ++c.others;
  if (where_atoms > 1) ++c.others;
  if (q.group_by.size() > 1) ++c.others;
  return c;
}

Hardness classify_counts(const ComponentCounts& counts) {
  // Spider's rule table is not monotone (e.g. c1=2, others=2 is extra but
  // c1=2, others=3 is hard). Take the maximum over all dominated count
  // vectors so adding a component never lowers the class.
  Hardness worst = Hardness::Easy;
  for (int c1 = 0; c1 <= counts.component1; ++c1) {
    for (int c2 = 0; c2 <= counts.component2; ++c2) {
      for (int o = 0; o <= counts.others; ++o) {
        worst = std::max(worst, spider_rule(c1, c2, o));
        if (worst == Hardness::Extra) return worst;
      }
    }
  }
  return worst;
}

Hardness classify_hardness(const Query& query) { return classify_counts(count_components(query)); }

}  // namespace teql::sql
