#include <charconv>
#include <string>
#include <vector>

#include "dtsim/circuit.h"
#include "dtsim/error.h"

namespace dtsim {
namespace {

struct Line {
  int number;
  std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    Line line{number, {}};
    const std::string_view row = text.substr(pos, end - pos);
    std::size_t i = 0;
    while (i < row.size()) {
      while (i < row.size() && (row[i] == ' ' || row[i] == '\t' || row[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < row.size() && row[j] != ' ' && row[j] != '\t' && row[j] != '\r') ++j;
      if (j > i) line.tokens.push_back(row.substr(i, j - i));
      i = j;
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

std::uint32_t number(std::string_view tok, int line) {
  std::uint32_t v = 0;
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
    throw Error(ErrorKind::kBadCircuit, "expected a number, found '" + std::string(tok) + "'",
                line, 1);
  }
  return v;
}

std::vector<std::uint32_t> widths(const Line& l) {
  const std::uint32_t n = number(l.tokens[0], l.number);
  if (l.tokens.size() != n + 1u || n == 0) {
    throw Error(ErrorKind::kBadCircuit, "group count does not match the listed widths", l.number,
                1);
  }
  std::vector<std::uint32_t> out;
  for (std::size_t i = 1; i < l.tokens.size(); ++i) out.push_back(number(l.tokens[i], l.number));
  return out;
}

}  // namespace

Circuit parse_bristol(std::string_view text) {
  const std::vector<Line> lines = tokenize(text);
  if (lines.size() < 3) throw Error(ErrorKind::kBadCircuit, "missing Bristol header lines");
  if (lines[0].tokens.size() != 2) {
    throw Error(ErrorKind::kBadCircuit, "first line must be '#gates #wires'", lines[0].number, 1);
  }
  const std::uint32_t ngates = number(lines[0].tokens[0], lines[0].number);
  Circuit c;
  c.wire_count = number(lines[0].tokens[1], lines[0].number);
  const std::vector<std::uint32_t> in_w = widths(lines[1]);
  const std::vector<std::uint32_t> out_w = widths(lines[2]);
  if (out_w.size() != 1 && out_w.size() != in_w.size()) {
    throw Error(ErrorKind::kBadCircuit,
                "need one output group, or one per input group", lines[2].number, 1);
  }
  std::uint64_t total_in = 0;
  std::uint64_t total_out = 0;
  for (std::uint32_t w : in_w) total_in += w;
  for (std::uint32_t w : out_w) total_out += w;
  if (total_in > c.wire_count || total_out > c.wire_count) {
    throw Error(ErrorKind::kBadCircuit, "more input or output wires than wires");
  }
  std::uint32_t next = 0;
  for (std::uint32_t w : in_w) {
    c.inputs.emplace_back();
    for (std::uint32_t i = 0; i < w; ++i) c.inputs.back().push_back(next++);
  }
  next = static_cast<std::uint32_t>(c.wire_count - total_out);
  std::vector<std::vector<std::uint32_t>> groups;
  for (std::uint32_t w : out_w) {
    groups.emplace_back();
    for (std::uint32_t i = 0; i < w; ++i) groups.back().push_back(next++);
  }
  c.outputs = groups.size() == 1 ? std::vector(in_w.size(), groups[0]) : groups;

  if (lines.size() - 3 != ngates) {
    throw Error(ErrorKind::kBadCircuit, "header declares " + std::to_string(ngates) +
                                            " gates, file lists " +
                                            std::to_string(lines.size() - 3));
  }
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const Line& l = lines[i];
    const std::string_view kind = l.tokens.back();
    GateKind k;
    if (kind == "XOR") {
      k = GateKind::kXor;
    } else if (kind == "AND") {
      k = GateKind::kAnd;
    } else if (kind == "INV") {
      k = GateKind::kInv;
    } else {
      throw Error(ErrorKind::kUnknownGateKind, "unsupported gate '" + std::string(kind) + "'",
                  l.number, 1);
    }
    const std::size_t arity = k == GateKind::kInv ? 1 : 2;
    if (l.tokens.size() != arity + 4 || number(l.tokens[0], l.number) != arity ||
        number(l.tokens[1], l.number) != 1) {
      throw Error(ErrorKind::kBadCircuit,
                  std::string(kind) + " gate line must read '" + std::to_string(arity) +
                      " 1 in... out " + std::string(kind) + "'",
                  l.number, 1);
    }
    Gate g{k, number(l.tokens[2], l.number), 0, 0};
    if (arity == 2) g.in2 = number(l.tokens[3], l.number);
    g.out = number(l.tokens[2 + arity], l.number);
    c.gates.push_back(g);
  }
  check_circuit(c);
  return c;
}

}  // namespace dtsim
