#include "teql/mr.hpp"

#include "teql/util.hpp"

namespace teql {

std::string_view mr_code(Mr mr) {
  switch (mr) {
    case Mr::PrefixInsertion: return "PI";
    case Mr::PrefixRemoval: return "PR";
    case Mr::PrefixSubstitution: return "PS";
    case Mr::SynonymSubstitution: return "SS";
    case Mr::Normalization: return "NO";
    case Mr::Flattening: return "FL";
    case Mr::OpaqueKey: return "OK";
    case Mr::TableShuffle: return "TS";
    case Mr::ColumnShuffle: return "CS";
    case Mr::ColumnRemoval: return "CRm";
    case Mr::ColumnRenaming: return "CRn";
    case Mr::ColumnInsertion: return "CI";
  }
  return "??";
}

std::string_view mr_name(Mr mr) {
  switch (mr) {
    case Mr::PrefixInsertion: return "Prefix Insertion";
    case Mr::PrefixRemoval: return "Prefix Removal";
    case Mr::PrefixSubstitution: return "Prefix Substitution";
    case Mr::SynonymSubstitution: return "Synonym Substitution";
    case Mr::Normalization: return "Normalization";
    case Mr::Flattening: return "Flattening";
    case Mr::OpaqueKey: return "Opaque Key";
    case Mr::TableShuffle: return "Table Shuffle";
    case Mr::ColumnShuffle: return "Column Shuffle";
    case Mr::ColumnRemoval: return "Column Removal";
    case Mr::ColumnRenaming: return "Column Renaming";
    case Mr::ColumnInsertion: return "Column Insertion";
  }
  return "unknown";
}

std::optional<Mr> parse_mr(std::string_view text) {
  const std::string want = to_lower(trim(text));
  for (Mr mr : kAllMrs) {
    if (want == to_lower(mr_code(mr)) || want == to_lower(mr_name(mr))) return mr;
  }
  return std::nullopt;
}

bool is_utterance_mr(Mr mr) { return mr_order(mr) <= mr_order(Mr::SynonymSubstitution); }

}  // namespace teql
