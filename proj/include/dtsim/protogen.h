#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dtsim/indep_test.h"
#include "dtsim/syntax.h"

namespace dtsim {

// Relative frequencies of the body statement kinds. Messages are what leak;
// with these defaults most full-size programs are still flagged at low
// power, and a few percent survive the filter.
struct OpWeights {
  double local = 5;        // assignment computed from values one party holds
  double send = 0.2;       // SEND of a held value to a party lacking it
  double oblivious = 0.2;  // 1-of-2 OBLIVIOUSLY between two parties
  double flip = 2;         // fresh FLIP
  friend bool operator==(const OpWeights&, const OpWeights&) = default;
};

// Parties are named P1..Pn. The program reads secret_bits SECRETs per party,
// then has body_len statements (assignments, sends, oblivious transfers,
// flips), then output_bits OUTPUTs per party.
struct GenConfig {
  std::size_t parties = 2;
  std::size_t secret_bits = 16;
  std::size_t random_bits = 48;  // upper bound: flips are created on first use
  std::size_t output_bits = 16;
  std::size_t body_len = 500;
  std::size_t max_width = 3;  // operands per computed expression
  bool usage_bias = true;     // false: operands drawn uniformly
  OpWeights weights;
  std::uint64_t seed = 0;

  void check() const;
};

std::string party_name(std::size_t index);

// Deterministic in cfg. Operands are drawn with weight 1 / (1 + uses so far).
// A party holding nothing at output time outputs a constant 0.
Program generate(const GenConfig& cfg);

// Seed of the i-th candidate in a filtered stream.
std::uint64_t candidate_seed(std::uint64_t root, std::size_t index);

struct FilterOptions {
  TestConfig test = {16, 128, 32, 0.05, 0, 1};
  std::vector<PartyId> corrupt = {"P2"};
  std::size_t keep = 10;
  std::size_t max_attempts = 1000;
  std::size_t threads = 1;  // candidates evaluated concurrently
};

struct FilterCandidate {
  std::size_t index;
  std::uint64_t seed;  // generator seed (0 for supplied programs)
  double p_value;
  Verdict verdict;
};

struct FilterResult {
  std::vector<Program> kept;
  std::vector<FilterCandidate> candidates;  // every evaluated candidate, in order
  std::size_t attempts = 0;
  std::size_t rejected = 0;
};

// Candidate i is drawn from `next(i)` and tested with seed
// derive_seed(opts.test.seed, {kTagFilter, i}); only MAYBE_SECURE candidates
// are kept. Throws Timeout if max_attempts pass before `keep` are kept.
FilterResult filter_stream(const std::function<Program(std::size_t)>& next,
                           const FilterOptions& opts);
// Candidates from generate() with seeds candidate_seed(cfg.seed, i).
FilterResult filter_stream(const GenConfig& cfg, const FilterOptions& opts);

}  // namespace dtsim
