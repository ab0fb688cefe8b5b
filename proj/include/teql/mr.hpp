#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "teql/schema.hpp"

namespace teql {

/// The twelve metamorphic relations, in canonical reporting order.
enum class Mr {
  PrefixInsertion,
  PrefixRemoval,
  PrefixSubstitution,
  SynonymSubstitution,
  Normalization,
  Flattening,
  OpaqueKey,
  TableShuffle,
  ColumnShuffle,
  ColumnRemoval,
  ColumnRenaming,
  ColumnInsertion,
};

inline constexpr std::array<Mr, 12> kAllMrs = {
    Mr::PrefixInsertion, Mr::PrefixRemoval,  Mr::PrefixSubstitution, Mr::SynonymSubstitution,
    Mr::Normalization,   Mr::Flattening,     Mr::OpaqueKey,          Mr::TableShuffle,
    Mr::ColumnShuffle,   Mr::ColumnRemoval,  Mr::ColumnRenaming,     Mr::ColumnInsertion};

/// Short code used in files and reports: PI, PR, PS, SS, NO, FL, OK, TS, CS, CRm, CRn, CI.
std::string_view mr_code(Mr mr);
std::string_view mr_name(Mr mr);
/// Accepts the short code or the display name, case-insensitively.
std::optional<Mr> parse_mr(std::string_view text);
bool is_utterance_mr(Mr mr);
inline int mr_order(Mr mr) { return static_cast<int>(mr); }

/// One transformed (utterance, schema) pair derived from a seed.
/// Exactly one side differs from the seed; gold_sql is the seed's verbatim.
struct TransformedCase {
  std::string case_id;
  std::string seed_id;
  Mr mr = Mr::PrefixInsertion;
  std::string utterance;
  Schema schema;
  std::string gold_sql;
  std::string provenance;

  bool operator==(const TransformedCase&) const = default;
};

}  // namespace teql
