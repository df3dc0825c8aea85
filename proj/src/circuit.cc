#include "dtsim/circuit.h"

#include <charconv>
#include <sstream>

#include "dtsim/error.h"

namespace dtsim {

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::kXor: return "XOR";
    case GateKind::kAnd: return "AND";
    case GateKind::kInv: return "INV";
  }
  return "?";
}

std::size_t Circuit::and_count() const {
  std::size_t n = 0;
  for (const Gate& g : gates) n += g.kind == GateKind::kAnd;
  return n;
}

void check_circuit(const Circuit& c) {
  std::vector<bool> set(c.wire_count, false);
  auto mark = [&](std::uint32_t w, const std::string& what) {
    if (w >= c.wire_count) {
      throw Error(ErrorKind::kTopologyViolation,
                  what + " wire " + std::to_string(w) + " is out of range");
    }
    if (set[w]) {
      throw Error(ErrorKind::kTopologyViolation, "wire " + std::to_string(w) + " written twice");
    }
    set[w] = true;
  };
  auto read = [&](std::uint32_t w, std::size_t gate) {
    if (w >= c.wire_count || !set[w]) {
      throw Error(ErrorKind::kTopologyViolation, "gate " + std::to_string(gate) +
                                                     " reads unwritten wire " + std::to_string(w));
    }
  };
  for (const auto& group : c.inputs) {
    for (std::uint32_t w : group) mark(w, "input");
  }
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    read(g.in1, i);
    if (g.kind != GateKind::kInv) read(g.in2, i);
    mark(g.out, "gate output");
  }
  for (const auto& group : c.outputs) {
    for (std::uint32_t w : group) {
      if (w >= c.wire_count || !set[w]) {
        throw Error(ErrorKind::kTopologyViolation,
                    "output wire " + std::to_string(w) + " is never written");
      }
    }
  }
}

std::vector<std::vector<std::uint8_t>> evaluate(
    const Circuit& c, const std::vector<std::vector<std::uint8_t>>& inputs) {
  if (inputs.size() != c.inputs.size()) {
    throw Error(ErrorKind::kWidthMismatch, "wrong number of input groups");
  }
  std::vector<std::uint8_t> w(c.wire_count, 0);
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    if (inputs[p].size() != c.inputs[p].size()) {
      throw Error(ErrorKind::kWidthMismatch, "wrong input width for party " + std::to_string(p));
    }
    for (std::size_t i = 0; i < inputs[p].size(); ++i) w[c.inputs[p][i]] = inputs[p][i] & 1;
  }
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::kXor: w[g.out] = w[g.in1] ^ w[g.in2]; break;
      case GateKind::kAnd: w[g.out] = w[g.in1] & w[g.in2]; break;
      case GateKind::kInv: w[g.out] = w[g.in1] ^ 1; break;
    }
  }
  std::vector<std::vector<std::uint8_t>> out;
  for (const auto& group : c.outputs) {
    out.emplace_back();
    for (std::uint32_t x : group) out.back().push_back(w[x]);
  }
  return out;
}

namespace {

class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::vector<std::size_t> widths) {
    for (std::size_t width : widths) {
      c_.inputs.emplace_back();
      for (std::size_t i = 0; i < width; ++i) c_.inputs.back().push_back(wire());
    }
    c_.outputs.resize(widths.size());
  }

  std::uint32_t in(std::size_t party, std::size_t i) const { return c_.inputs[party][i]; }
  std::uint32_t gate(GateKind k, std::uint32_t a, std::uint32_t b = 0) {
    const std::uint32_t o = wire();
    c_.gates.push_back({k, a, b, o});
    return o;
  }
  std::uint32_t xor_(std::uint32_t a, std::uint32_t b) { return gate(GateKind::kXor, a, b); }
  std::uint32_t and_(std::uint32_t a, std::uint32_t b) { return gate(GateKind::kAnd, a, b); }
  std::uint32_t inv(std::uint32_t a) { return gate(GateKind::kInv, a); }
  void output(std::size_t party, std::uint32_t w) { c_.outputs[party].push_back(w); }

  Circuit finish() {
    check_circuit(c_);
    return std::move(c_);
  }

 private:
  std::uint32_t wire() { return static_cast<std::uint32_t>(c_.wire_count++); }
  Circuit c_;
};

void require_width(std::size_t n) {
  if (n < 1) throw Error(ErrorKind::kInvalidConfig, "circuit width must be at least 1");
}

}  // namespace

Circuit gen_adder(std::size_t n) {
  require_width(n);
  CircuitBuilder b({n, n});
  std::vector<std::uint32_t> sum(n);
  std::uint32_t carry = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = n - 1 - k;  // least significant first
    const std::uint32_t x = b.in(0, i);
    const std::uint32_t y = b.in(1, i);
    const std::uint32_t t = b.xor_(x, y);
    if (k == 0) {
      sum[i] = t;
      carry = b.and_(x, y);
    } else {
      sum[i] = b.xor_(t, carry);
      const std::uint32_t gen = b.and_(x, y);
      const std::uint32_t prop = b.and_(carry, t);
      carry = b.xor_(gen, prop);
    }
  }
  for (std::size_t p = 0; p < 2; ++p) {
    b.output(p, carry);
    for (std::uint32_t s : sum) b.output(p, s);
  }
  return b.finish();
}

// Scans from the most significant bit. gt accumulates "x wins at some
// position where y has not already won"; OR is (a & b) ^ (a ^ b).
Circuit gen_less_than(std::size_t n) {
  require_width(n);
  CircuitBuilder b({n, n});
  const std::uint32_t ny0 = b.inv(b.in(1, 0));
  std::uint32_t gt = b.and_(b.in(0, 0), ny0);
  std::uint32_t ywin = 0;
  if (n > 1) ywin = b.and_(b.in(1, 0), b.inv(b.in(0, 0)));
  std::uint32_t guard = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::uint32_t ny = b.inv(b.in(1, i));
    guard = i == 1 ? b.inv(ywin) : b.and_(guard, b.inv(ywin));
    const std::uint32_t term = b.and_(b.in(0, i), b.and_(ny, guard));
    const std::uint32_t both = b.and_(gt, term);
    const std::uint32_t either = b.xor_(gt, term);
    gt = b.xor_(both, either);
    if (i + 1 < n) ywin = b.and_(b.in(1, i), b.inv(b.in(0, i)));
  }
  b.output(0, gt);
  b.output(1, gt);
  return b.finish();
}

Circuit gen_beaver_triple_gen(std::size_t n) {
  require_width(n);
  CircuitBuilder b({3 * n, 3 * n});
  auto a = [&](std::size_t p, std::size_t i) { return b.in(p, i); };
  auto bb = [&](std::size_t p, std::size_t i) { return b.in(p, n + i); };
  auto m = [&](std::size_t p, std::size_t i) { return b.in(p, 2 * n + i); };
  std::vector<std::uint32_t> c2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t av = b.xor_(a(0, i), a(1, i));
    const std::uint32_t bv = b.xor_(bb(0, i), bb(1, i));
    c2[i] = b.xor_(b.and_(av, bv), m(0, i));
  }
  for (std::size_t i = 0; i < n; ++i) b.output(0, a(0, i));
  for (std::size_t i = 0; i < n; ++i) b.output(0, bb(0, i));
  for (std::size_t i = 0; i < n; ++i) b.output(0, m(0, i));
  for (std::size_t i = 0; i < n; ++i) b.output(1, a(1, i));
  for (std::size_t i = 0; i < n; ++i) b.output(1, bb(1, i));
  for (std::size_t i = 0; i < n; ++i) b.output(1, c2[i]);
  return b.finish();
}

Circuit builtin_circuit(std::string_view name) {
  const std::size_t colon = name.find(':');
  std::size_t n = 0;
  if (colon != std::string_view::npos) {
    const std::string_view digits = name.substr(colon + 1);
    const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (r.ec != std::errc() || r.ptr != digits.data() + digits.size()) n = 0;
  }
  const std::string_view kind = name.substr(0, colon);
  if (n == 0 || n > 64) {
    throw Error(ErrorKind::kInvalidConfig,
                "builtin circuit '" + std::string(name) + "' needs a width 1..64, e.g. lt:2");
  }
  if (kind == "adder") return gen_adder(n);
  if (kind == "lt") return gen_less_than(n);
  if (kind == "btgen") return gen_beaver_triple_gen(n);
  throw Error(ErrorKind::kInvalidConfig,
              "unknown builtin circuit '" + std::string(kind) + "' (adder, lt, btgen)");
}

}  // namespace dtsim
