#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dtsim/syntax.h"

namespace dtsim {

struct Circuit;
struct CompileOptions;

enum class MutationKind { kBiasedSharing, kBiasedAnd, kAccidentalSecret, kAccidentalGate };

const char* to_string(MutationKind kind);

// A bug injected during compilation. The biased coin is the AND of `bias`
// fresh flips, so it is 1 with probability 2^-bias; bias 1 is a fair flip.
//
// Sites are honest input wires (biased_sharing, accidental_secret) or AND
// gates (biased_and, accidental_gate), numbered in circuit order.
struct MutationSpec {
  MutationKind kind = MutationKind::kBiasedSharing;
  std::uint32_t bias = 1;
  bool all_sites = true;
  std::vector<std::size_t> sites;  // used when !all_sites
  std::size_t pick = 0;            // > 0: that many sites drawn with `seed`
  std::uint64_t seed = 0;
  PartyId honest = "P1";
  PartyId corrupt = "P2";

  friend bool operator==(const MutationSpec&, const MutationSpec&) = default;
};

// "kind=biased_sharing,b=3,sites=all"; also sites=0:2:5, pick=K, seed=S,
// honest=P, corrupt=P. Throws InvalidConfig.
MutationSpec parse_mutation_spec(std::string_view text);
std::string format_mutation_spec(const MutationSpec& spec);

// Site indices a spec selects out of `available` candidates. Throws
// NoSuchSite when an index is out of range or nothing can be selected.
std::vector<std::size_t> select_sites(const MutationSpec& spec, std::size_t available);

// Compiles `c` with `spec` injected.
Program mutate(const Circuit& c, const CompileOptions& opts, const MutationSpec& spec);

// Generic programs support only accidental_secret: each selected SECRET read
// by the honest party is leaked right after it is read. Sites are the honest
// party's SECRET statements in program order.
Program mutate_program(const Program& program, const MutationSpec& spec);

}  // namespace dtsim
