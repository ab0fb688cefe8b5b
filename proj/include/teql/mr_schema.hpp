#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "teql/lexicon.hpp"
#include "teql/mr.hpp"
#include "teql/schema.hpp"
#include "teql/sql.hpp"

namespace teql {

/// One schema-level rewrite. `touched_*` index the *input* schema.
struct SchemaRewrite {
  Mr kind = Mr::OpaqueKey;
  std::string before_fingerprint;
  Schema after;
  std::set<int> touched_columns;
  std::set<int> touched_tables;
  std::optional<std::uint64_t> rng_seed;
  std::string provenance;
};

std::string schema_fingerprint(const Schema& schema);

/// Factor one unused, non-key column per rewrite into "<T>_<c>_ref".
std::vector<SchemaRewrite> normalize(const Schema& schema, const sql::UsageSet& usage, int max_variants,
                                     std::uint64_t rng_seed);

/// Merge a wholly unused referenced table into its referrer.
std::vector<SchemaRewrite> flatten(const Schema& schema, const sql::UsageSet& usage, int max_variants);

/// Drop FK constraints: all at once first, then one at a time. With
/// `drop_primary_keys`, the all-at-once variant also clears primary keys.
std::vector<SchemaRewrite> opaque_key(const Schema& schema, int max_variants, bool drop_primary_keys = false);

std::vector<SchemaRewrite> table_shuffle(const Schema& schema, int max_variants, std::uint64_t rng_seed);
std::vector<SchemaRewrite> column_shuffle(const Schema& schema, int max_variants, std::uint64_t rng_seed);

std::vector<SchemaRewrite> column_remove(const Schema& schema, const sql::UsageSet& usage, int max_variants);

/// `skipped`, when given, receives one note per rename rejected for a name collision.
std::vector<SchemaRewrite> column_rename(const Schema& schema, const sql::UsageSet& usage,
                                         const RenameLexicon& renames, int max_variants,
                                         std::vector<std::string>* skipped = nullptr);

std::vector<SchemaRewrite> column_insert(const Schema& schema, const AttributeProvider& kb, int max_variants);

}  // namespace teql
