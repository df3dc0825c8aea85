#include <gtest/gtest.h>

#include "dtsim/circuit.h"
#include "dtsim/error.h"
#include "test_util.h"

namespace dtsim {
namespace {

ErrorKind bristol_error(const std::string& text) {
  try {
    parse_bristol(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kIo;
}

std::uint64_t value(const std::vector<std::uint8_t>& bits) {
  std::uint64_t v = 0;
  for (std::uint8_t b : bits) v = 2 * v + b;
  return v;
}

std::vector<std::uint8_t> bits(std::uint64_t v, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[n - 1 - i] = v >> i & 1;
  return out;
}

TEST(Bristol, SingleGate) {
  const Circuit c = parse_bristol("1 3\n2 1 1\n1 1\n2 1 0 1 2 XOR");
  EXPECT_EQ(c.wire_count, 3u);
  ASSERT_EQ(c.gates.size(), 1u);
  EXPECT_EQ(c.gates[0], (Gate{GateKind::kXor, 0, 1, 2}));
  EXPECT_EQ(c.inputs, (std::vector<std::vector<std::uint32_t>>{{0}, {1}}));
  EXPECT_EQ(c.outputs, (std::vector<std::vector<std::uint32_t>>{{2}, {2}}));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      EXPECT_EQ(evaluate(c, {{std::uint8_t(a)}, {std::uint8_t(b)}})[0][0], a ^ b);
    }
  }
}

TEST(Bristol, Errors) {
  EXPECT_EQ(bristol_error("1 4\n2 1 1\n1 1\n2 1 0 3 2 XOR"), ErrorKind::kTopologyViolation);
  EXPECT_EQ(bristol_error("2 3\n2 1 1\n1 1\n2 1 0 1 2 XOR\n2 1 0 1 2 AND"),
            ErrorKind::kTopologyViolation);
  EXPECT_EQ(bristol_error("1 3\n2 1 1\n1 1\n2 1 0 1 0 XOR"), ErrorKind::kTopologyViolation);
  EXPECT_EQ(bristol_error("1 3\n2 1 1\n1 1\n2 1 0 1 7 XOR"), ErrorKind::kTopologyViolation);
  EXPECT_EQ(bristol_error("1 3\n2 1 1\n1 1\n2 1 0 1 2 MAND"), ErrorKind::kUnknownGateKind);
  EXPECT_EQ(bristol_error("1 3\n2 1 1\n1 1\n1 1 0 2 EQW"), ErrorKind::kUnknownGateKind);
  EXPECT_EQ(bristol_error("1 3\n2 1 1\n1 1\n2 1 0 2 XOR"), ErrorKind::kBadCircuit);
  EXPECT_EQ(bristol_error("2 3\n2 1 1\n1 1\n2 1 0 1 2 XOR"), ErrorKind::kBadCircuit);
  EXPECT_EQ(bristol_error("1 3\n2 1\n1 1\n2 1 0 1 2 XOR"), ErrorKind::kBadCircuit);
  EXPECT_EQ(bristol_error("1 x\n2 1 1\n1 1\n2 1 0 1 2 XOR"), ErrorKind::kBadCircuit);
  EXPECT_EQ(bristol_error(""), ErrorKind::kBadCircuit);
}

TEST(Bristol, TwoOutputGroups) {
  const Circuit c = parse_bristol("2 5\n2 1 1\n2 1 1\n2 1 0 1 3 AND\n2 1 0 1 4 XOR\n");
  EXPECT_EQ(c.outputs, (std::vector<std::vector<std::uint32_t>>{{3}, {4}}));
}

TEST(Bristol, TwoBitLessThanFile) {
  const Circuit c = parse_bristol(testing::read_source("circuits/lt2.txt"));
  EXPECT_EQ(c.gates.size(), 11u);
  EXPECT_EQ(c.and_count(), 5u);
  EXPECT_EQ(c, gen_less_than(2));
  for (std::uint64_t x = 0; x < 4; ++x) {
    for (std::uint64_t y = 0; y < 4; ++y) {
      const auto out = evaluate(c, {bits(x, 2), bits(y, 2)});
      EXPECT_EQ(out[0][0], y < x ? 1 : 0);
      EXPECT_EQ(out[1][0], y < x ? 1 : 0);
    }
  }
}

TEST(Builtin, HalfAdder) {
  const Circuit c = gen_adder(1);
  EXPECT_EQ(evaluate(c, {{1}, {1}})[0], (std::vector<std::uint8_t>{1, 0}));
}

TEST(Builtin, AdderAndLessThanExhaustive) {
  for (std::size_t n = 1; n <= 5; ++n) {
    const Circuit add = gen_adder(n);
    const Circuit lt = gen_less_than(n);
    for (std::uint64_t x = 0; x < (1u << n); ++x) {
      for (std::uint64_t y = 0; y < (1u << n); ++y) {
        const auto s = evaluate(add, {bits(x, n), bits(y, n)});
        ASSERT_EQ(s[0].size(), n + 1);
        EXPECT_EQ(value(s[0]), x + y);
        EXPECT_EQ(s[1], s[0]);
        const auto l = evaluate(lt, {bits(x, n), bits(y, n)});
        EXPECT_EQ(l[0], (std::vector<std::uint8_t>{y < x ? std::uint8_t(1) : std::uint8_t(0)}));
        EXPECT_EQ(l[1], l[0]);
      }
    }
  }
  EXPECT_EQ(gen_less_than(1).gates.size(), 2u);
}

TEST(Builtin, BeaverTripleGeneration) {
  for (std::size_t n = 1; n <= 2; ++n) {
    const Circuit c = gen_beaver_triple_gen(n);
    ASSERT_EQ(c.inputs[0].size(), 3 * n);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << (6 * n)); ++v) {
      const auto in1 = bits(v >> (3 * n), 3 * n);
      const auto in2 = bits(v & ((1u << (3 * n)) - 1), 3 * n);
      const auto out = evaluate(c, {in1, in2});
      ASSERT_EQ(out[0].size(), 3 * n);
      ASSERT_EQ(out[1].size(), 3 * n);
      EXPECT_EQ(out[0], in1);
      for (std::size_t i = 0; i < n; ++i) {
        const int a = out[0][i] ^ out[1][i];
        const int b = out[0][n + i] ^ out[1][n + i];
        const int cc = out[0][2 * n + i] ^ out[1][2 * n + i];
        EXPECT_EQ(cc, a & b);
        EXPECT_EQ(out[1][i], in2[i]);
      }
    }
  }
}

TEST(Builtin, Names) {
  EXPECT_EQ(builtin_circuit("adder:3"), gen_adder(3));
  EXPECT_EQ(builtin_circuit("lt:4"), gen_less_than(4));
  EXPECT_EQ(builtin_circuit("btgen:2"), gen_beaver_triple_gen(2));
  EXPECT_THROW(builtin_circuit("lt"), Error);
  EXPECT_THROW(builtin_circuit("lt:0"), Error);
  EXPECT_THROW(builtin_circuit("mul:2"), Error);
  EXPECT_THROW(builtin_circuit("lt:2x"), Error);
}

}  // namespace
}  // namespace dtsim
