#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dtsim {

enum class GateKind { kXor, kAnd, kInv };

const char* to_string(GateKind kind);

struct Gate {
  GateKind kind;
  std::uint32_t in1;
  std::uint32_t in2;  // unused for kInv
  std::uint32_t out;
  friend bool operator==(const Gate&, const Gate&) = default;
};

// A boolean circuit over numbered wires. Multi-bit values are listed
// most-significant bit first in both input and output wire lists.
struct Circuit {
  std::size_t wire_count = 0;
  std::vector<std::vector<std::uint32_t>> inputs;   // per party
  std::vector<std::vector<std::uint32_t>> outputs;  // per party; may overlap
  std::vector<Gate> gates;

  std::size_t parties() const { return inputs.size(); }
  std::size_t and_count() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

// Throws TopologyViolation unless every gate reads only circuit inputs or
// earlier gate outputs, every wire is written at most once, and every output
// wire carries a value.
void check_circuit(const Circuit& c);

// Plaintext evaluation; `inputs[p]` lists party p's bits in wire-list order.
std::vector<std::vector<std::uint8_t>> evaluate(
    const Circuit& c, const std::vector<std::vector<std::uint8_t>>& inputs);

// Bristol fashion: `#gates #wires`, `#groups width...` for inputs and outputs,
// then `#in #out in... out KIND` per gate. Input group i belongs to party i;
// a single output group goes to every party, otherwise group i to party i.
// Only XOR, AND and INV gates are accepted.
Circuit parse_bristol(std::string_view text);

// Both parties input n bits; both receive the (n+1)-bit sum, carry first.
Circuit gen_adder(std::size_t n);

// Both parties input n bits; both receive [y < x] for x held by the first
// party and y by the second.
Circuit gen_less_than(std::size_t n);

// Each party inputs n bits each of a, b and mask. The first party receives
// (a1, b1, m1), the second (a2, b2, ((a1^a2) & (b1^b2)) ^ m1), so that
// (a1^a2) & (b1^b2) = m1 ^ c2 bitwise.
Circuit gen_beaver_triple_gen(std::size_t n);

// Parses "adder:N", "lt:N" or "btgen:N".
Circuit builtin_circuit(std::string_view name);

}  // namespace dtsim
