#include <map>
#include <set>
#include <string>
#include <vector>

#include "dtsim/syntax.h"

namespace dtsim {

int Locations::party_index(const PartyId& p) const {
  for (std::size_t i = 0; i < parties.size(); ++i) {
    if (parties[i] == p) return static_cast<int>(i);
  }
  return -1;
}

std::vector<PartyId> Locations::owner_list(const std::string& var) const {
  std::vector<PartyId> out;
  auto it = owners.find(var);
  if (it == owners.end()) return out;
  for (std::size_t i = 0; i < parties.size(); ++i) {
    if (it->second >> i & 1) out.push_back(parties[i]);
  }
  return out;
}

bool Locations::knows(const PartyId& p, const std::string& var) const {
  const int idx = party_index(p);
  auto it = knowers.find(var);
  return idx >= 0 && it != knowers.end() && (it->second >> idx & 1);
}

namespace {

class Validator {
 public:
  explicit Validator(const Program& program) : program_(program) {
    result_.locations.parties = program.parties;
  }

  ValidationResult run() {
    if (program_.parties.size() > kMaxParties) {
      error(ErrorKind::kInvalidConfig, "more than 64 parties", 0);
      return result_;
    }
    if (!program_.macros.empty()) {
      error(ErrorKind::kInvalidConfig, "program still contains macro definitions", 0);
    }
    for (const Stmt& s : program_.body) {
      if (const auto* a = std::get_if<Assign>(&s.node)) {
        assign(*a, s.line);
      } else if (const auto* send = std::get_if<Send>(&s.node)) {
        this->send(*send, s.line);
      } else if (const auto* out = std::get_if<Output>(&s.node)) {
        output(*out, s.line);
      } else {
        error(ErrorKind::kInvalidConfig,
              "unexpanded macro call '" + std::get<MacroCall>(s.node).name + "'", s.line);
      }
    }
    return std::move(result_);
  }

 private:
  void error(ErrorKind kind, std::string msg, int line) {
    result_.errors.push_back({kind, std::move(msg), line});
  }

  PartyMask bit(const PartyId& p, int line) {
    const int idx = result_.locations.party_index(p);
    if (idx < 0) {
      error(ErrorKind::kInvalidConfig, "party '" + p + "' is not in the party list", line);
      return 0;
    }
    return PartyMask{1} << idx;
  }

  // Knowers of `var`, or nullopt (with a diagnostic) if it was never assigned.
  std::optional<PartyMask> known(const std::string& var, int line) {
    auto& k = result_.locations.knowers;
    auto it = k.find(var);
    if (it == k.end()) {
      if (failed_.count(var)) return std::nullopt;
      error(ErrorKind::kUseBeforeAssign, "'" + var + "' is used before it is assigned", line);
      return std::nullopt;
    }
    return it->second;
  }

  void collect_vars(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == Expr::Kind::kVar) out.push_back(e.name);
    for (const Expr& a : e.args) collect_vars(a, out);
  }

  bool check_table(const SelectTree& t, std::vector<std::string>& selectors, std::size_t level,
                   std::size_t depth, std::vector<std::string>& leaves, int line) {
    if (t.is_leaf()) {
      if (level != depth) {
        error(ErrorKind::kBadOblivious, "oblivious table is not a complete selection tree", line);
        return false;
      }
      leaves.push_back(t.leaf);
      return true;
    }
    if (t.branches.size() != 2) {
      error(ErrorKind::kBadOblivious, "oblivious table nodes select between exactly two entries",
            line);
      return false;
    }
    if (selectors.size() <= level) selectors.resize(level + 1);
    if (selectors[level].empty()) {
      selectors[level] = t.selector;
    } else if (selectors[level] != t.selector) {
      error(ErrorKind::kBadOblivious,
            "oblivious table level " + std::to_string(level) + " mixes selectors '" +
                selectors[level] + "' and '" + t.selector + "'",
            line);
      return false;
    }
    return check_table(t.branches[0], selectors, level + 1, depth, leaves, line) &&
           check_table(t.branches[1], selectors, level + 1, depth, leaves, line);
  }

  // A target whose assignment was rejected is remembered so later uses do
  // not report a second, derived error.
  void assign(const Assign& a, int line) {
    auto& loc = result_.locations;
    if (loc.owners.count(a.target)) {
      error(ErrorKind::kReassignment, "'" + a.target + "' is assigned twice", line);
      return;
    }
    assign_fresh(a, line);
    if (!loc.owners.count(a.target)) failed_.insert(a.target);
  }

  void assign_fresh(const Assign& a, int line) {
    auto& loc = result_.locations;
    PartyMask owners = 0;
    if (const auto* f = std::get_if<FlipRhs>(&a.rhs)) {
      owners = bit(f->party, line);
    } else if (const auto* s = std::get_if<SecretRhs>(&a.rhs)) {
      owners = bit(s->party, line);
    } else if (const auto* e = std::get_if<ExprRhs>(&a.rhs)) {
      std::vector<std::string> vars;
      collect_vars(e->expr, vars);
      if (vars.empty()) {
        if (!e->party) {
          error(ErrorKind::kCrossPartyExpression,
                "constant assignment to '" + a.target + "' needs an @party annotation", line);
          return;
        }
        owners = bit(*e->party, line);
      } else {
        if (e->party) {
          error(ErrorKind::kCrossPartyExpression,
                "@party annotations are only allowed on constant expressions", line);
          return;
        }
        owners = ~PartyMask{0};
        for (const std::string& v : vars) {
          auto k = known(v, line);
          if (!k) return;
          owners &= *k;
        }
        if (owners == 0) {
          error(ErrorKind::kCrossPartyExpression,
                "no single party holds every operand of '" + a.target + "'", line);
          return;
        }
      }
    } else {
      const auto& o = std::get<ObliviousRhs>(a.rhs);
      const PartyMask receiver = bit(o.receiver, line);
      if (!receiver) return;
      if (o.table.is_leaf()) {
        error(ErrorKind::kBadOblivious, "oblivious table needs at least one selection", line);
        return;
      }
      std::vector<std::string> selectors;
      std::vector<std::string> leaves;
      if (!check_table(o.table, selectors, 0, static_cast<std::size_t>(o.table.depth()), leaves,
                       line)) {
        return;
      }
      for (const std::string& s : selectors) {
        auto k = known(s, line);
        if (!k) return;
        if (!(*k & receiver)) {
          error(ErrorKind::kCrossPartyExpression,
                "selector '" + s + "' is not held by receiver " + o.receiver, line);
          return;
        }
      }
      PartyMask senders = ~receiver;
      for (const std::string& l : leaves) {
        auto k = known(l, line);
        if (!k) return;
        senders &= *k;
      }
      if (senders == 0) {
        error(ErrorKind::kCrossPartyExpression,
              "no party other than " + o.receiver + " holds every table entry", line);
        return;
      }
      owners = receiver;
    }
    if (owners == 0) return;
    loc.owners[a.target] = owners;
    loc.knowers[a.target] = owners;
  }

  void send(const Send& s, int line) {
    auto k = known(s.var, line);
    if (!k) return;
    const PartyMask to = bit(s.to, line);
    if (!to) return;
    if (*k & to) {
      error(ErrorKind::kBadSend, "'" + s.var + "' is already held by " + s.to, line);
      return;
    }
    result_.locations.knowers[s.var] |= to;
  }

  void output(const Output& o, int line) {
    auto k = known(o.var, line);
    if (!k || !o.party) return;
    const PartyMask p = bit(*o.party, line);
    if (p && !(*k & p)) {
      error(ErrorKind::kCrossPartyExpression, *o.party + " cannot output '" + o.var +
                                                  "', which it does not hold",
            line);
    }
  }

  const Program& program_;
  ValidationResult result_;
  std::set<std::string> failed_;
};

}  // namespace

ValidationResult validate(const Program& program) {
  return Validator(program).run();
}

Locations validate_or_throw(const Program& program) {
  ValidationResult r = validate(program);
  if (!r.ok()) {
    const Diagnostic& d = r.errors.front();
    throw Error(d.kind, d.message, d.line, d.line > 0 ? 1 : 0);
  }
  return std::move(r.locations);
}

}  // namespace dtsim
