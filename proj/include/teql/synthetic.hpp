#pragma once

#include <cstdint>
#include <vector>

#include "teql/dataset.hpp"
#include "teql/schema.hpp"

namespace teql {

struct SyntheticCorpus {
  std::vector<Schema> schemas;
  std::vector<Example> examples;
};

/// Seeded corpus of chain-shaped schemas (each table points at the previous
/// one) and templated question/SQL pairs over them. Used for scale and
/// property tests; identical inputs give identical output.
SyntheticCorpus make_synthetic_corpus(std::size_t seed_count, std::uint64_t rng_seed, std::size_t seeds_per_schema = 8);

}  // namespace teql
