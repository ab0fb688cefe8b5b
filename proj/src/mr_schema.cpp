#include "teql/mr_schema.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "teql/util.hpp"

namespace teql {

std::string schema_fingerprint(const Schema& schema) { return fingerprint(serialize_schema(schema)); }

namespace {

// Editable view of a schema in which columns carry stable ids, so tables
// and columns can move freely and keys follow them. Materializing groups
// columns by table, star first.
struct LColumn {
  int id;
  std::string name;
  std::string original;
  ColType type;
};

struct LTable {
  std::string name;
  std::string original;
  std::vector<LColumn> columns;
};

struct Logical {
  std::string db_id;
  LColumn star;
  std::vector<LTable> tables;
  std::vector<int> primary_keys;
  std::vector<std::pair<int, int>> foreign_keys;
  int next_id = 0;

  static Logical from(const Schema& s) {
    Logical l;
    l.db_id = s.db_id;
    const Column& star = s.columns.at(0);
    l.star = LColumn{0, star.name, star.original_name, star.col_type};
    for (const Table& t : s.tables) {
      LTable lt{t.name, t.original_name, {}};
      for (int c : t.column_indices) {
        const Column& col = s.columns[static_cast<std::size_t>(c)];
        lt.columns.push_back(LColumn{c, col.name, col.original_name, col.col_type});
      }
      l.tables.push_back(std::move(lt));
    }
    l.primary_keys = s.primary_keys;
    l.foreign_keys = s.foreign_keys;
    l.next_id = static_cast<int>(s.columns.size());
    return l;
  }

  int fresh_id() { return next_id++; }

  Schema build() const {
    Schema s;
    s.db_id = db_id;
    std::map<int, int> remap;
    s.columns.push_back(Column{0, -1, star.name, star.original, star.type});
    remap[star.id] = 0;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      s.tables.push_back(Table{static_cast<int>(t), tables[t].name, tables[t].original, {}});
      for (const LColumn& c : tables[t].columns) {
        const int idx = static_cast<int>(s.columns.size());
        remap[c.id] = idx;
        s.columns.push_back(Column{idx, static_cast<int>(t), c.name, c.original, c.type});
      }
    }
    for (int pk : primary_keys) {
      if (auto it = remap.find(pk); it != remap.end()) s.primary_keys.push_back(it->second);
    }
    for (auto [a, b] : foreign_keys) {
      auto ia = remap.find(a);
      auto ib = remap.find(b);
      if (ia != remap.end() && ib != remap.end()) s.foreign_keys.emplace_back(ia->second, ib->second);
    }
    reindex_tables(s);
    return s;
  }
};

bool table_has_column(const LTable& t, std::string_view original) {
  const std::string want = to_lower(original);
  return std::any_of(t.columns.begin(), t.columns.end(),
                     [&](const LColumn& c) { return to_lower(c.original) == want; });
}

bool schema_has_table(const Schema& s, std::string_view original) { return s.find_table(original).has_value(); }

std::size_t cap(int max_variants) { return max_variants < 0 ? 0 : static_cast<std::size_t>(max_variants); }

SchemaRewrite make_rewrite(Mr kind, const Schema& before, Schema after, std::string provenance) {
  SchemaRewrite rw;
  rw.kind = kind;
  rw.before_fingerprint = schema_fingerprint(before);
  rw.after = std::move(after);
  rw.provenance = std::move(provenance);
  return rw;
}

std::string qualified_original(const Schema& s, int column) {
  const Column& c = s.columns.at(static_cast<std::size_t>(column));
  return s.tables.at(static_cast<std::size_t>(c.table_index)).original_name + "." + c.original_name;
}

/// Unused, non-key, non-star columns in schema order.
std::vector<int> free_columns(const Schema& s, const sql::UsageSet& usage) {
  std::vector<int> out;
  for (const Column& c : s.columns) {
    if (c.index == 0 || usage.protects_column(s, c.index) || s.is_key(c.index)) continue;
    out.push_back(c.index);
  }
  return out;
}

std::string match_case(std::string_view model, std::string_view word) {
  const bool has_alpha = std::any_of(model.begin(), model.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
  const bool all_upper = has_alpha && std::none_of(model.begin(), model.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c));
  });
  if (all_upper) return to_upper(word);
  std::string out(word);
  if (!model.empty() && std::isupper(static_cast<unsigned char>(model[0])) && !out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::vector<SchemaRewrite> normalize(const Schema& schema, const sql::UsageSet& usage, int max_variants,
                                     std::uint64_t rng_seed) {
  std::vector<int> candidates;
  for (int c : free_columns(schema, usage)) {
    const Column& col = schema.columns[static_cast<std::size_t>(c)];
    const Table& t = schema.tables[static_cast<std::size_t>(col.table_index)];
    const std::string ref_table = t.original_name + "_" + col.original_name + "_ref";
    if (schema_has_table(schema, ref_table)) continue;
    if (schema.find_column(t.index, col.original_name + "_link")) continue;
    candidates.push_back(c);
  }
  if (candidates.size() > cap(max_variants)) {
    Rng rng(rng_seed);
    std::vector<int> picked;
    for (std::size_t i : rng.choose(candidates.size(), cap(max_variants))) picked.push_back(candidates[i]);
    candidates = std::move(picked);
  }

  std::vector<SchemaRewrite> out;
  for (int c : candidates) {
    Logical l = Logical::from(schema);
    const Column& col = schema.columns[static_cast<std::size_t>(c)];
    LTable& owner = l.tables[static_cast<std::size_t>(col.table_index)];
    auto it = std::find_if(owner.columns.begin(), owner.columns.end(), [&](const LColumn& lc) { return lc.id == c; });
    const LColumn moved = *it;
    const int link_id = l.fresh_id();
    const int key_id = l.fresh_id();
    *it = LColumn{link_id, moved.name + " link", moved.original + "_link", ColType::Number};
    LTable ref{owner.name + " " + moved.name + " ref", owner.original + "_" + moved.original + "_ref", {}};
    ref.columns.push_back(LColumn{key_id, moved.name + " link key", moved.original + "_link_key", ColType::Number});
    ref.columns.push_back(moved);
    const std::string ref_name = ref.original;
    l.tables.push_back(std::move(ref));
    l.primary_keys.push_back(key_id);
    l.foreign_keys.emplace_back(link_id, key_id);
    SchemaRewrite rw = make_rewrite(Mr::Normalization, schema, l.build(),
                                    "normalized " + qualified_original(schema, c) + " into " + ref_name);
    rw.touched_columns = {c};
    rw.rng_seed = rng_seed;
    out.push_back(std::move(rw));
  }
  return out;
}

std::vector<SchemaRewrite> flatten(const Schema& schema, const sql::UsageSet& usage, int max_variants) {
  std::vector<SchemaRewrite> out;
  for (std::size_t i = 0; i < schema.foreign_keys.size() && out.size() < cap(max_variants); ++i) {
    const auto [from, to] = schema.foreign_keys[i];
    const int main_table = schema.columns[static_cast<std::size_t>(from)].table_index;
    const int ref_table = schema.columns[static_cast<std::size_t>(to)].table_index;
    if (usage.protects_table(ref_table) || usage.star_tables.count(ref_table)) continue;
    const Table& ref = schema.tables[static_cast<std::size_t>(ref_table)];
    if (std::any_of(ref.column_indices.begin(), ref.column_indices.end(),
                    [&](int c) { return usage.protects_column(schema, c); })) {
      continue;
    }

    Logical l = Logical::from(schema);
    LTable& main = l.tables[static_cast<std::size_t>(main_table)];
    const LTable& lref = l.tables[static_cast<std::size_t>(ref_table)];
    std::vector<std::string> notes;
    for (const LColumn& c : lref.columns) {
      if (schema.is_primary_key(c.id)) continue;
      LColumn moved = c;
      if (table_has_column(main, moved.original)) {
        moved.original = lref.original + "_" + c.original;
        moved.name = lref.name + " " + c.name;
        int suffix = 2;
        const std::string base_original = moved.original;
        const std::string base_name = moved.name;
        while (table_has_column(main, moved.original)) {
          moved.original = base_original + "_" + std::to_string(suffix);
          moved.name = base_name + " " + std::to_string(suffix);
          ++suffix;
        }
        notes.push_back("renamed " + c.original + " to " + moved.original);
      }
      main.columns.push_back(std::move(moved));
    }
    // Keys on dropped columns disappear when the schema is rebuilt; record them.
    for (std::size_t k = 0; k < schema.foreign_keys.size(); ++k) {
      if (k == i) continue;
      const auto [a, b] = schema.foreign_keys[k];
      if ((schema.columns[static_cast<std::size_t>(a)].table_index == ref_table && schema.is_primary_key(a)) ||
          (schema.columns[static_cast<std::size_t>(b)].table_index == ref_table && schema.is_primary_key(b))) {
        notes.push_back("dropped dangling foreign key " + qualified_original(schema, a) + " -> " +
                        qualified_original(schema, b));
      }
    }
    l.tables.erase(l.tables.begin() + ref_table);
    std::string provenance = "flattened " + ref.original_name + " into " +
                             schema.tables[static_cast<std::size_t>(main_table)].original_name + " via " +
                             qualified_original(schema, from);
    if (!notes.empty()) provenance += " (" + join(notes, "; ") + ")";
    SchemaRewrite rw = make_rewrite(Mr::Flattening, schema, l.build(), std::move(provenance));
    rw.touched_tables = {ref_table};
    rw.touched_columns.insert(ref.column_indices.begin(), ref.column_indices.end());
    out.push_back(std::move(rw));
  }
  return out;
}

std::vector<SchemaRewrite> opaque_key(const Schema& schema, int max_variants, bool drop_primary_keys) {
  std::vector<SchemaRewrite> out;
  if (schema.foreign_keys.empty() || cap(max_variants) == 0) return out;
  const bool all_differs = schema.foreign_keys.size() > 1 || (drop_primary_keys && !schema.primary_keys.empty());
  if (all_differs) {
    Schema after = schema;
    after.foreign_keys.clear();
    if (drop_primary_keys) after.primary_keys.clear();
    out.push_back(make_rewrite(Mr::OpaqueKey, schema, std::move(after),
                               drop_primary_keys ? "removed all key constraints" : "removed all foreign keys"));
  }
  for (std::size_t i = 0; i < schema.foreign_keys.size() && out.size() < cap(max_variants); ++i) {
    Schema after = schema;
    after.foreign_keys.erase(after.foreign_keys.begin() + static_cast<std::ptrdiff_t>(i));
    const auto [a, b] = schema.foreign_keys[i];
    out.push_back(make_rewrite(Mr::OpaqueKey, schema, std::move(after),
                               "removed foreign key " + qualified_original(schema, a) + " -> " +
                                   qualified_original(schema, b)));
  }
  return out;
}

namespace {

/// (n! - 1) saturated at `limit`.
std::size_t nonidentity_permutations(std::size_t n, std::size_t limit) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    f *= i;
    if (f > limit + 1) return limit + 1;
  }
  return f - 1;
}

/// Up to `want` distinct non-identity permutations of [0, n): every one in
/// lexicographic order when the space is small, rejection sampling otherwise.
std::vector<std::vector<int>> distinct_permutations(std::size_t n, std::size_t want, Rng& rng) {
  std::vector<std::vector<int>> out;
  if (n < 2 || want == 0) return out;
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  if (nonidentity_permutations(n, want) <= want) {
    std::vector<int> p = identity;
    while (std::next_permutation(p.begin(), p.end())) out.push_back(p);
    return out;
  }
  std::set<std::vector<int>> seen{identity};
  while (out.size() < want) {
    std::vector<int> p = identity;
    rng.shuffle(p);
    if (seen.insert(p).second) out.push_back(std::move(p));
  }
  return out;
}

std::string describe_order(const std::vector<int>& perm) {
  std::vector<std::string> parts;
  for (int i : perm) parts.push_back(std::to_string(i));
  return "[" + join(parts, ",") + "]";
}

}  // namespace

std::vector<SchemaRewrite> table_shuffle(const Schema& schema, int max_variants, std::uint64_t rng_seed) {
  std::vector<SchemaRewrite> out;
  Rng rng(rng_seed);
  for (const auto& perm : distinct_permutations(schema.tables.size(), cap(max_variants), rng)) {
    Logical base = Logical::from(schema);
    Logical l = base;
    for (std::size_t i = 0; i < perm.size(); ++i) l.tables[i] = base.tables[static_cast<std::size_t>(perm[i])];
    SchemaRewrite rw = make_rewrite(Mr::TableShuffle, schema, l.build(), "table order " + describe_order(perm));
    rw.rng_seed = rng_seed;
    out.push_back(std::move(rw));
  }
  return out;
}

std::vector<SchemaRewrite> column_shuffle(const Schema& schema, int max_variants, std::uint64_t rng_seed) {
  std::vector<SchemaRewrite> out;
  const std::size_t want = cap(max_variants);
  std::vector<int> eligible;
  std::size_t space = 0;
  for (const Table& t : schema.tables) {
    if (t.column_indices.size() < 2) continue;
    eligible.push_back(t.index);
    space += nonidentity_permutations(t.column_indices.size(), want);
  }
  if (eligible.empty() || want == 0) return out;

  Rng rng(rng_seed);
  std::vector<std::pair<int, std::vector<int>>> variants;
  if (space <= want) {
    for (int t : eligible) {
      Rng unused(0);
      for (auto& p : distinct_permutations(schema.tables[static_cast<std::size_t>(t)].column_indices.size(),
                                           want, unused)) {
        variants.emplace_back(t, std::move(p));
      }
    }
  } else {
    std::set<std::pair<int, std::vector<int>>> seen;
    while (variants.size() < want) {
      const int t = eligible[static_cast<std::size_t>(rng.below(eligible.size()))];
      const std::size_t n = schema.tables[static_cast<std::size_t>(t)].column_indices.size();
      std::vector<int> p(n);
      std::iota(p.begin(), p.end(), 0);
      rng.shuffle(p);
      if (std::is_sorted(p.begin(), p.end())) continue;
      if (seen.emplace(t, p).second) variants.emplace_back(t, std::move(p));
    }
  }

  for (const auto& [t, perm] : variants) {
    Logical l = Logical::from(schema);
    LTable& table = l.tables[static_cast<std::size_t>(t)];
    std::vector<LColumn> reordered;
    for (int i : perm) reordered.push_back(table.columns[static_cast<std::size_t>(i)]);
    table.columns = std::move(reordered);
    SchemaRewrite rw = make_rewrite(Mr::ColumnShuffle, schema, l.build(),
                                    "column order of " + schema.tables[static_cast<std::size_t>(t)].original_name +
                                        " " + describe_order(perm));
    rw.rng_seed = rng_seed;
    out.push_back(std::move(rw));
  }
  return out;
}

std::vector<SchemaRewrite> column_remove(const Schema& schema, const sql::UsageSet& usage, int max_variants) {
  std::vector<SchemaRewrite> out;
  for (int c : free_columns(schema, usage)) {
    if (out.size() >= cap(max_variants)) break;
    const Column& col = schema.columns[static_cast<std::size_t>(c)];
    if (schema.tables[static_cast<std::size_t>(col.table_index)].column_indices.size() < 2) continue;
    Logical l = Logical::from(schema);
    auto& cols = l.tables[static_cast<std::size_t>(col.table_index)].columns;
    cols.erase(std::remove_if(cols.begin(), cols.end(), [&](const LColumn& lc) { return lc.id == c; }), cols.end());
    SchemaRewrite rw = make_rewrite(Mr::ColumnRemoval, schema, l.build(), "removed " + qualified_original(schema, c));
    rw.touched_columns = {c};
    out.push_back(std::move(rw));
  }
  return out;
}

std::vector<SchemaRewrite> column_rename(const Schema& schema, const sql::UsageSet& usage,
                                         const RenameLexicon& renames, int max_variants,
                                         std::vector<std::string>* skipped) {
  std::vector<SchemaRewrite> out;
  for (const Column& col : schema.columns) {
    if (col.index == 0 || usage.protects_column(schema, col.index)) continue;
    const std::vector<std::string> tokens = split(col.original_name, '_');

    // (token range [first, last), replacement phrase) pairs; whole name first.
    struct Candidate {
      std::size_t first, last;
      std::string key, synonym;
    };
    std::vector<Candidate> candidates;
    std::vector<std::string> lowered;
    for (const auto& t : tokens) lowered.push_back(to_lower(t));
    const std::string whole = join(lowered, " ");
    if (auto it = renames.find(whole); it != renames.end()) {
      for (const auto& syn : it->second) candidates.push_back({0, tokens.size(), whole, syn});
    }
    if (tokens.size() > 1) {
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (auto it = renames.find(lowered[i]); it != renames.end()) {
          for (const auto& syn : it->second) candidates.push_back({i, i + 1, lowered[i], syn});
        }
      }
    }

    for (const Candidate& cand : candidates) {
      if (out.size() >= cap(max_variants)) return out;
      std::vector<std::string> new_tokens(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(cand.first));
      std::string replacement = cand.synonym;
      std::replace(replacement.begin(), replacement.end(), ' ', '_');
      new_tokens.push_back(match_case(tokens[cand.first], replacement));
      new_tokens.insert(new_tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(cand.last), tokens.end());
      const std::string new_original = join(new_tokens, "_");

      if (schema.find_column(col.table_index, new_original)) {
        if (skipped) {
          skipped->push_back("rename " + qualified_original(schema, col.index) + " -> " + new_original +
                             " collides with an existing column");
        }
        continue;
      }
      std::string new_display = to_lower(new_original);
      std::replace(new_display.begin(), new_display.end(), '_', ' ');

      Schema after = schema;
      Column& target = after.columns[static_cast<std::size_t>(col.index)];
      target.original_name = new_original;
      target.name = new_display;
      SchemaRewrite rw = make_rewrite(Mr::ColumnRenaming, schema, std::move(after),
                                      "renamed " + qualified_original(schema, col.index) + " to " + new_original);
      rw.touched_columns = {col.index};
      out.push_back(std::move(rw));
    }
  }
  return out;
}

std::vector<SchemaRewrite> column_insert(const Schema& schema, const AttributeProvider& kb, int max_variants) {
  std::vector<SchemaRewrite> out;
  for (const Table& t : schema.tables) {
    std::vector<std::string> keys{singularize(t.original_name)};
    const auto parts = split(to_lower(t.original_name), '_');
    if (parts.size() > 1) keys.push_back(singularize(parts.back()));
    std::vector<Attribute> attrs;
    for (const auto& key : keys) {
      attrs = kb.attributes(key);
      if (!attrs.empty()) break;
    }
    for (const auto& [attr, type] : attrs) {
      if (out.size() >= cap(max_variants)) return out;
      if (schema.find_column(t.index, attr)) continue;
      Logical l = Logical::from(schema);
      std::string display = attr;
      std::replace(display.begin(), display.end(), '_', ' ');
      const std::string original = match_case(t.original_name, attr);
      l.tables[static_cast<std::size_t>(t.index)].columns.push_back(LColumn{l.fresh_id(), display, original, type});
      SchemaRewrite rw = make_rewrite(Mr::ColumnInsertion, schema, l.build(),
                                      "inserted " + t.original_name + "." + original);
      out.push_back(std::move(rw));
    }
  }
  return out;
}

}  // namespace teql
