#include "dtsim/compile.h"

#include <algorithm>
#include <set>

#include "dtsim/error.h"

namespace dtsim {

const char* to_string(Framework f) { return f == Framework::kGmw ? "gmw" : "beaver"; }

Framework parse_framework(std::string_view name) {
  if (name == "gmw") return Framework::kGmw;
  if (name == "beaver") return Framework::kBeaver;
  throw Error(ErrorKind::kInvalidConfig,
              "unknown framework '" + std::string(name) + "' (gmw, beaver)");
}

namespace {

const PartyId kParty[2] = {"P1", "P2"};
const PartyId kDealer = "D";

Expr var(const std::string& n) { return Expr::var(n); }
Expr bit(bool b) { return Expr::constant(b); }
Expr operator+(Expr a, Expr b) { return Expr::exclusive(std::move(a), std::move(b)); }
Expr operator^(Expr a, Expr b) { return Expr::conj(std::move(a), std::move(b)); }

std::string wire_var(std::uint32_t w, std::size_t q) {
  return "w" + std::to_string(w) + "_" + std::to_string(q + 1);
}

class Compiler {
 public:
  Compiler(const Circuit& c, const CompileOptions& opts) : c_(c), opts_(opts) {}

  Program run() {
    check_circuit(c_);
    if (c_.parties() != 2) {
      throw Error(ErrorKind::kBadCircuit, "compilation needs exactly two input parties, got " +
                                              std::to_string(c_.parties()));
    }
    beaver_ = opts_.framework == Framework::kBeaver;
    if (opts_.mutation) plan_mutation(*opts_.mutation);

    for (std::size_t p = 0; p < 2; ++p) {
      for (std::uint32_t w : c_.inputs[p]) {
        assign("x" + std::to_string(w), SecretRhs{kParty[p]});
      }
    }
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t i = 0; i < c_.inputs[p].size(); ++i) share_input(p, i);
    }
    std::size_t and_index = 0;
    for (const Gate& g : c_.gates) {
      switch (g.kind) {
        case GateKind::kXor:
          for (std::size_t q = 0; q < 2; ++q) {
            local(wire_var(g.out, q), var(wire_var(g.in1, q)) + var(wire_var(g.in2, q)),
                  {wire_var(g.in1, q), wire_var(g.in2, q)});
          }
          break;
        case GateKind::kInv:
          local(wire_var(g.out, 0), Expr::negate(var(wire_var(g.in1, 0))), {wire_var(g.in1, 0)});
          local(wire_var(g.out, 1), var(wire_var(g.in1, 1)), {wire_var(g.in1, 1)});
          break;
        case GateKind::kAnd:
          if (beaver_) {
            and_beaver(g, and_index);
          } else {
            and_gmw(g, and_index);
          }
          if (selected(MutationKind::kAccidentalGate, and_index)) {
            leak("l" + std::to_string(g.out), wire_var(g.out, honest_));
          }
          ++and_index;
          break;
      }
    }
    reveal_outputs();

    Program prog;
    prog.parties = {kParty[0], kParty[1]};
    if (beaver_) prog.parties.push_back(kDealer);
    prog.body = std::move(body_);
    validate_or_throw(prog);
    return prog;
  }

 private:
  void plan_mutation(const MutationSpec& m) {
    auto index_of = [&](const PartyId& p) -> int {
      if (p == kParty[0]) return 0;
      if (p == kParty[1]) return 1;
      if (beaver_ && p == kDealer) return 2;
      return -1;
    };
    const int h = index_of(m.honest);
    const int cor = index_of(m.corrupt);
    if (h < 0 || h > 1) {
      throw Error(ErrorKind::kIncompatibleKind,
                  "honest party must be P1 or P2, got '" + m.honest + "'");
    }
    if (cor < 0 || cor == h) {
      throw Error(ErrorKind::kIncompatibleKind,
                  "corrupt party '" + m.corrupt + "' must be another party of the protocol");
    }
    honest_ = static_cast<std::size_t>(h);
    const bool on_inputs =
        m.kind == MutationKind::kBiasedSharing || m.kind == MutationKind::kAccidentalSecret;
    const std::size_t available = on_inputs ? c_.inputs[honest_].size() : c_.and_count();
    const std::vector<std::size_t> s = select_sites(m, available);
    sites_.insert(s.begin(), s.end());
  }

  bool selected(MutationKind kind, std::size_t site) const {
    return opts_.mutation && opts_.mutation->kind == kind && sites_.count(site);
  }

  PartyMask mask(const PartyId& p) const {
    if (p == kParty[0]) return 1;
    if (p == kParty[1]) return 2;
    return 4;
  }

  void emit(Stmt::Node node) { body_.push_back(Stmt{std::move(node), 0}); }

  void assign(const std::string& target, Rhs rhs) {
    PartyMask k = 0;
    if (const auto* f = std::get_if<FlipRhs>(&rhs)) k = mask(f->party);
    if (const auto* s = std::get_if<SecretRhs>(&rhs)) k = mask(s->party);
    if (const auto* o = std::get_if<ObliviousRhs>(&rhs)) k = mask(o->receiver);
    known_[target] = k;
    emit(Assign{target, std::move(rhs)});
  }

  // Computed by every party holding all of `operands`.
  void local(const std::string& target, Expr e, const std::vector<std::string>& operands) {
    PartyMask k = ~PartyMask{0};
    for (const std::string& o : operands) k &= known_.at(o);
    known_[target] = k;
    emit(Assign{target, ExprRhs{std::move(e), std::nullopt}});
  }

  void send(const std::string& v, const PartyId& to) {
    known_[v] |= mask(to);
    emit(Send{v, to});
  }

  // A fair flip, or with a bias the AND of `bias` flips.
  void coin(const std::string& target, const PartyId& party, std::uint32_t bias) {
    if (bias <= 1) {
      assign(target, FlipRhs{party});
      return;
    }
    std::vector<std::string> parts;
    for (std::uint32_t j = 0; j < bias; ++j) {
      parts.push_back(target + "_c" + std::to_string(j));
      assign(parts.back(), FlipRhs{party});
    }
    Expr e = var(parts[0]);
    for (std::size_t j = 1; j < parts.size(); ++j) e = std::move(e) ^ var(parts[j]);
    local(target, std::move(e), parts);
  }

  // The honest party sends `v` masked by a biased coin to the corrupt party.
  void leak(const std::string& base, const std::string& v) {
    const MutationSpec& m = *opts_.mutation;
    coin(base + "_r", kParty[honest_], m.bias);
    local(base, var(v) + var(base + "_r"), {v, base + "_r"});
    send(base, m.corrupt);
  }

  void share_input(std::size_t p, std::size_t i) {
    const std::uint32_t w = c_.inputs[p][i];
    const std::string mask_share = wire_var(w, p);
    const std::string sent_share = wire_var(w, 1 - p);
    const std::string x = "x" + std::to_string(w);
    const bool honest = opts_.mutation && p == honest_;
    if (honest && selected(MutationKind::kBiasedSharing, i)) {
      coin(mask_share, kParty[p], opts_.mutation->bias);
    } else {
      assign(mask_share, FlipRhs{kParty[p]});
    }
    local(sent_share, var(x) + var(mask_share), {x, mask_share});
    send(sent_share, kParty[1 - p]);
    if (honest && selected(MutationKind::kAccidentalSecret, i)) {
      leak("l" + std::to_string(w), x);
    }
  }

  void and_gmw(const Gate& g, std::size_t index) {
    const std::string out2 = wire_var(g.out, 1);
    if (selected(MutationKind::kBiasedAnd, index)) {
      coin(out2, kParty[1], opts_.mutation->bias);
    } else {
      assign(out2, FlipRhs{kParty[1]});
    }
    const std::string x2 = wire_var(g.in1, 1);
    const std::string y2 = wire_var(g.in2, 1);
    std::string entry[2][2];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        entry[a][b] = "t" + std::to_string(g.out) + "_" + std::to_string(a) + std::to_string(b);
        local(entry[a][b], var(out2) + ((var(x2) + bit(a)) ^ (var(y2) + bit(b))), {out2, x2, y2});
      }
    }
    SelectTree table;
    table.selector = wire_var(g.in1, 0);
    for (int a = 0; a < 2; ++a) {
      SelectTree inner;
      inner.selector = wire_var(g.in2, 0);
      for (int b = 0; b < 2; ++b) inner.branches.push_back(SelectTree{entry[a][b], "", {}});
      table.branches.push_back(std::move(inner));
    }
    assign(wire_var(g.out, 0), ObliviousRhs{std::move(table), kParty[0]});
  }

  void and_beaver(const Gate& g, std::size_t index) {
    const std::string o = std::to_string(g.out);
    const std::string a = "a" + o;
    const std::string b = "b" + o;
    const std::string c = "c" + o;
    assign(a, FlipRhs{kDealer});
    assign(b, FlipRhs{kDealer});
    local(c, var(a) ^ var(b), {a, b});
    for (const std::string& v : {a, b, c}) {
      if (selected(MutationKind::kBiasedAnd, index)) {
        coin(v + "_1", kDealer, opts_.mutation->bias);
      } else {
        assign(v + "_1", FlipRhs{kDealer});
      }
      local(v + "_2", var(v) + var(v + "_1"), {v, v + "_1"});
      send(v + "_1", kParty[0]);
      send(v + "_2", kParty[1]);
    }
    const std::string d = "d" + o;
    const std::string e = "e" + o;
    for (std::size_t q = 0; q < 2; ++q) {
      const std::string sq = "_" + std::to_string(q + 1);
      local(d + sq, var(wire_var(g.in1, q)) + var(a + sq), {wire_var(g.in1, q), a + sq});
      local(e + sq, var(wire_var(g.in2, q)) + var(b + sq), {wire_var(g.in2, q), b + sq});
    }
    send(d + "_1", kParty[1]);
    send(d + "_2", kParty[0]);
    send(e + "_1", kParty[1]);
    send(e + "_2", kParty[0]);
    local(d, var(d + "_1") + var(d + "_2"), {d + "_1", d + "_2"});
    local(e, var(e + "_1") + var(e + "_2"), {e + "_1", e + "_2"});
    local(wire_var(g.out, 0),
          var(c + "_1") + (var(d) ^ var(b + "_1")) + (var(e) ^ var(a + "_1")) + (var(d) ^ var(e)),
          {c + "_1", d, e, a + "_1", b + "_1"});
    local(wire_var(g.out, 1), var(c + "_2") + (var(d) ^ var(b + "_2")) + (var(e) ^ var(a + "_2")),
          {c + "_2", d, e, a + "_2", b + "_2"});
  }

  void reveal(std::uint32_t w, PartyMask recipients) {
    // Each share goes to the recipients that lack it: P1's share first.
    for (std::size_t q = 0; q < 2; ++q) {
      const std::string s = wire_var(w, q);
      for (std::size_t p = 0; p < 2; ++p) {
        if ((recipients >> p & 1) && !(known_.at(s) & mask(kParty[p]))) send(s, kParty[p]);
      }
    }
    local("o" + std::to_string(w), var(wire_var(w, 0)) + var(wire_var(w, 1)),
          {wire_var(w, 0), wire_var(w, 1)});
  }

  void reveal_outputs() {
    std::set<std::uint32_t> done;
    if (c_.outputs[0] == c_.outputs[1]) {
      for (std::uint32_t w : c_.outputs[0]) {
        if (done.insert(w).second) reveal(w, 3);
        emit(Output{"o" + std::to_string(w), std::nullopt});
      }
      return;
    }
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::uint32_t w : c_.outputs[p]) {
        if (!done.insert(w).second) continue;
        PartyMask r = 0;
        for (std::size_t q = 0; q < 2; ++q) {
          const auto& list = c_.outputs[q];
          if (std::find(list.begin(), list.end(), w) != list.end()) r |= PartyMask{1} << q;
        }
        reveal(w, r);
      }
    }
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::uint32_t w : c_.outputs[p]) emit(Output{"o" + std::to_string(w), kParty[p]});
    }
  }

  const Circuit& c_;
  const CompileOptions& opts_;
  bool beaver_ = false;
  std::size_t honest_ = 0;
  std::set<std::size_t> sites_;
  std::map<std::string, PartyMask> known_;
  std::vector<Stmt> body_;
};

}  // namespace

Program compile_gmw(const Circuit& c, const CompileOptions& opts) {
  CompileOptions o = opts;
  o.framework = Framework::kGmw;
  return Compiler(c, o).run();
}

Program compile_beaver(const Circuit& c, const CompileOptions& opts) {
  CompileOptions o = opts;
  o.framework = Framework::kBeaver;
  return Compiler(c, o).run();
}

Program compile(const Circuit& c, const CompileOptions& opts) {
  return opts.framework == Framework::kGmw ? compile_gmw(c, opts) : compile_beaver(c, opts);
}

}  // namespace dtsim
