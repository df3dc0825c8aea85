#include <map>
#include <set>
#include <string>
#include <vector>

#include "dtsim/syntax.h"

namespace dtsim {
namespace {

void collect_expr_names(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::kVar) out.insert(e.name);
  for (const Expr& a : e.args) collect_expr_names(a, out);
}

void collect_table_names(const SelectTree& t, std::set<std::string>& out) {
  if (t.is_leaf()) {
    out.insert(t.leaf);
    return;
  }
  out.insert(t.selector);
  for (const SelectTree& b : t.branches) collect_table_names(b, out);
}

void collect_stmt_names(const Stmt& s, std::set<std::string>& out) {
  if (const auto* a = std::get_if<Assign>(&s.node)) {
    out.insert(a->target);
    if (const auto* e = std::get_if<ExprRhs>(&a->rhs)) collect_expr_names(e->expr, out);
    if (const auto* o = std::get_if<ObliviousRhs>(&a->rhs)) collect_table_names(o->table, out);
  } else if (const auto* send = std::get_if<Send>(&s.node)) {
    out.insert(send->var);
  } else if (const auto* o = std::get_if<Output>(&s.node)) {
    out.insert(o->var);
  } else {
    const auto& c = std::get<MacroCall>(s.node);
    for (const PartyArgs& g : c.parties) out.insert(g.names.begin(), g.names.end());
    for (const Rename& r : c.renames) out.insert(r.outer);
  }
}

class Expander {
 public:
  explicit Expander(const Program& program) {
    for (const MacroDef& m : program.macros) {
      macros_[m.name] = &m;
      for (const Stmt& s : m.body) collect_stmt_names(s, used_);
    }
    for (const Stmt& s : program.body) collect_stmt_names(s, used_);
  }

  void expand_body(const std::vector<Stmt>& body, std::vector<Stmt>& out) {
    for (const Stmt& s : body) {
      if (const auto* call = std::get_if<MacroCall>(&s.node)) {
        expand_call(*call, s.line, out);
      } else {
        out.push_back(s);
      }
    }
  }

 private:
  struct Scope {
    std::map<PartyId, PartyId> parties;
    std::map<std::string, std::string> names;
    std::uint64_t id = 0;
  };

  std::string fresh(const std::string& base, std::uint64_t id) {
    std::string cand = base + "__" + std::to_string(id);
    while (used_.count(cand)) cand += "_";
    used_.insert(cand);
    return cand;
  }

  std::string rename(Scope& sc, const std::string& name) {
    auto it = sc.names.find(name);
    if (it != sc.names.end()) return it->second;
    std::string f = fresh(name, sc.id);
    sc.names.emplace(name, f);
    return f;
  }

  PartyId party(const Scope& sc, const PartyId& p) const {
    auto it = sc.parties.find(p);
    return it == sc.parties.end() ? p : it->second;
  }

  Expr rewrite(Scope& sc, const Expr& e) {
    Expr out = e;
    if (out.kind == Expr::Kind::kVar) out.name = rename(sc, e.name);
    for (Expr& a : out.args) a = rewrite(sc, a);
    return out;
  }

  SelectTree rewrite(Scope& sc, const SelectTree& t) {
    SelectTree out;
    if (t.is_leaf()) {
      out.leaf = rename(sc, t.leaf);
      return out;
    }
    out.selector = rename(sc, t.selector);
    for (const SelectTree& b : t.branches) out.branches.push_back(rewrite(sc, b));
    return out;
  }

  void expand_call(const MacroCall& call, int line, std::vector<Stmt>& out) {
    auto found = macros_.find(call.name);
    if (found == macros_.end()) {
      throw Error(ErrorKind::kUnknownMacro, "call to undefined macro '" + call.name + "'", line, 1);
    }
    const MacroDef& def = *found->second;
    if (def.params.size() != call.parties.size()) {
      throw Error(ErrorKind::kArityMismatch,
                  "macro '" + def.name + "' takes " + std::to_string(def.params.size()) +
                      " party groups, got " + std::to_string(call.parties.size()),
                  line, 1);
    }
    Scope sc;
    sc.id = next_id_++;
    for (std::size_t i = 0; i < def.params.size(); ++i) {
      const PartyArgs& formal = def.params[i];
      const PartyArgs& actual = call.parties[i];
      if (formal.names.size() != actual.names.size()) {
        throw Error(ErrorKind::kArityMismatch,
                    "macro '" + def.name + "' party " + formal.party + " takes " +
                        std::to_string(formal.names.size()) + " arguments, got " +
                        std::to_string(actual.names.size()),
                    line, 1);
      }
      sc.parties[formal.party] = actual.party;
      for (std::size_t j = 0; j < formal.names.size(); ++j) {
        sc.names[formal.names[j]] = actual.names[j];
      }
    }
    std::set<std::string> assigned;
    for (const Stmt& s : def.body) {
      if (const auto* a = std::get_if<Assign>(&s.node)) assigned.insert(a->target);
      if (const auto* c = std::get_if<MacroCall>(&s.node)) {
        for (const Rename& r : c->renames) assigned.insert(r.outer);
      }
    }
    for (const Rename& r : call.renames) {
      if (!assigned.count(r.inner)) {
        throw Error(ErrorKind::kRenameOfUndefinedInnerVar,
                    "GET binds '" + r.inner + "', which macro '" + def.name + "' never assigns",
                    line, 1);
      }
      sc.names[r.inner] = r.outer;
    }

    for (const Stmt& s : def.body) {
      Stmt ns;
      ns.line = line;
      if (const auto* a = std::get_if<Assign>(&s.node)) {
        Assign na;
        na.target = rename(sc, a->target);
        if (const auto* f = std::get_if<FlipRhs>(&a->rhs)) {
          na.rhs = FlipRhs{party(sc, f->party)};
        } else if (const auto* sec = std::get_if<SecretRhs>(&a->rhs)) {
          na.rhs = SecretRhs{party(sc, sec->party)};
        } else if (const auto* e = std::get_if<ExprRhs>(&a->rhs)) {
          ExprRhs ne{rewrite(sc, e->expr), std::nullopt};
          if (e->party) ne.party = party(sc, *e->party);
          na.rhs = std::move(ne);
        } else {
          const auto& o = std::get<ObliviousRhs>(a->rhs);
          na.rhs = ObliviousRhs{rewrite(sc, o.table), party(sc, o.receiver)};
        }
        ns.node = std::move(na);
      } else if (const auto* send = std::get_if<Send>(&s.node)) {
        ns.node = Send{rename(sc, send->var), party(sc, send->to)};
      } else if (const auto* o = std::get_if<Output>(&s.node)) {
        Output no{rename(sc, o->var), std::nullopt};
        if (o->party) no.party = party(sc, *o->party);
        ns.node = std::move(no);
      } else {
        const auto& inner = std::get<MacroCall>(s.node);
        MacroCall nc;
        nc.name = inner.name;
        for (const PartyArgs& g : inner.parties) {
          PartyArgs ng{party(sc, g.party), {}};
          for (const std::string& n : g.names) ng.names.push_back(rename(sc, n));
          nc.parties.push_back(std::move(ng));
        }
        for (const Rename& r : inner.renames) nc.renames.push_back({rename(sc, r.outer), r.inner});
        expand_call(nc, line, out);
        continue;
      }
      out.push_back(std::move(ns));
    }
  }

  std::map<std::string, const MacroDef*> macros_;
  std::set<std::string> used_;
  std::uint64_t next_id_ = 1;
};

}  // namespace

Program expand_macros(const Program& program) {
  Program out;
  Expander ex(program);
  ex.expand_body(program.body, out.body);
  out.parties = program.parties;
  for (const PartyId& p : collect_parties(out.body)) {
    bool known = false;
    for (const PartyId& q : out.parties) known = known || q == p;
    if (!known) out.parties.push_back(p);
  }
  return out;
}

}  // namespace dtsim
