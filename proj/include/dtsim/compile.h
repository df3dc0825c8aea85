#pragma once

#include <optional>

#include "dtsim/circuit.h"
#include "dtsim/mutator.h"
#include "dtsim/syntax.h"

namespace dtsim {

// GMW: two parties P1, P2; AND gates use a 1-of-4 oblivious transfer.
// Beaver: adds the dealer D, who hands out one multiplication triple per AND.
enum class Framework { kGmw, kBeaver };

const char* to_string(Framework f);
Framework parse_framework(std::string_view name);

struct CompileOptions {
  Framework framework = Framework::kGmw;
  std::optional<MutationSpec> mutation;
};

// Share of wire w held by P1 is named `w<w>_1`, by P2 `w<w>_2`; input bits are
// `x<w>`, revealed outputs `o<w>`. Circuits must have exactly two parties.
Program compile_gmw(const Circuit& c, const CompileOptions& opts = {});
Program compile_beaver(const Circuit& c, const CompileOptions& opts = {});
// Dispatches on opts.framework.
Program compile(const Circuit& c, const CompileOptions& opts);

}  // namespace dtsim
