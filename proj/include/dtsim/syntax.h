#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dtsim/error.h"

namespace dtsim {

using PartyId = std::string;

// Bit-level expression. `+` is XOR, `^` is AND, `~` is NOT.
struct Expr {
  enum class Kind { kConst, kVar, kNot, kAnd, kXor };

  Kind kind = Kind::kConst;
  bool value = false;      // kConst
  std::string name;        // kVar
  std::vector<Expr> args;  // kNot: 1, kAnd/kXor: 2

  static Expr constant(bool v);
  static Expr var(std::string n);
  static Expr negate(Expr e);
  static Expr conj(Expr a, Expr b);
  static Expr exclusive(Expr a, Expr b);

  friend bool operator==(const Expr&, const Expr&) = default;
};

// OBLIVIOUSLY table: either a leaf variable (held by the sender) or a
// two-way selection on a receiver-held variable.
struct SelectTree {
  std::string leaf;
  std::string selector;
  std::vector<SelectTree> branches;  // empty for a leaf, else exactly 2

  bool is_leaf() const { return branches.empty(); }
  int depth() const;

  friend bool operator==(const SelectTree&, const SelectTree&) = default;
};

struct FlipRhs {
  PartyId party;
  friend bool operator==(const FlipRhs&, const FlipRhs&) = default;
};

struct SecretRhs {
  PartyId party;
  friend bool operator==(const SecretRhs&, const SecretRhs&) = default;
};

struct ExprRhs {
  Expr expr;
  // Only meaningful (and only accepted) when expr references no variable:
  // pins a constant to a party, e.g. `z = 0 @P1`.
  std::optional<PartyId> party;
  friend bool operator==(const ExprRhs&, const ExprRhs&) = default;
};

struct ObliviousRhs {
  SelectTree table;
  PartyId receiver;
  friend bool operator==(const ObliviousRhs&, const ObliviousRhs&) = default;
};

using Rhs = std::variant<FlipRhs, SecretRhs, ExprRhs, ObliviousRhs>;

struct Assign {
  std::string target;
  Rhs rhs;
  friend bool operator==(const Assign&, const Assign&) = default;
};

struct Send {
  std::string var;
  PartyId to;
  friend bool operator==(const Send&, const Send&) = default;
};

struct Output {
  std::string var;
  // Without a party the bit is written by every party that computed it.
  std::optional<PartyId> party;
  friend bool operator==(const Output&, const Output&) = default;
};

struct PartyArgs {
  PartyId party;
  std::vector<std::string> names;
  friend bool operator==(const PartyArgs&, const PartyArgs&) = default;
};

struct Rename {
  std::string outer;
  std::string inner;
  friend bool operator==(const Rename&, const Rename&) = default;
};

struct MacroCall {
  std::string name;
  std::vector<PartyArgs> parties;
  std::vector<Rename> renames;
  friend bool operator==(const MacroCall&, const MacroCall&) = default;
};

struct Stmt {
  using Node = std::variant<Assign, Send, Output, MacroCall>;
  Node node;
  int line = 0;  // source line; not part of equality

  friend bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
};

struct MacroDef {
  std::string name;
  std::vector<PartyArgs> params;  // formal party name + parameter names
  std::vector<Stmt> body;
  friend bool operator==(const MacroDef&, const MacroDef&) = default;
};

struct Program {
  std::vector<PartyId> parties;  // order of first use
  std::vector<MacroDef> macros;
  std::vector<Stmt> body;
  friend bool operator==(const Program&, const Program&) = default;
};

Program parse_program(std::string_view text);

std::string print_program(const Program& program);
std::string print_expr(const Expr& expr);

// Inlines every macro call. Listed GET names replace the inner names; all
// other inner variables receive fresh `__<n>` suffixes.
Program expand_macros(const Program& program);

// Parties referenced by `body` in order of first appearance.
std::vector<PartyId> collect_parties(const std::vector<Stmt>& body);

// Reorders/extends the party list; every party used by the program must be
// listed.
Program with_party_order(Program program, const std::vector<PartyId>& order);

using PartyMask = std::uint64_t;
inline constexpr std::size_t kMaxParties = 64;

// Result of validate(). A variable is *owned* by the parties that compute it
// and *known* by its owners plus every party it was sent to.
struct Locations {
  std::vector<PartyId> parties;
  std::map<std::string, PartyMask> owners;
  std::map<std::string, PartyMask> knowers;

  int party_index(const PartyId& p) const;  // -1 when absent
  std::vector<PartyId> owner_list(const std::string& var) const;
  bool knows(const PartyId& p, const std::string& var) const;
};

struct Diagnostic {
  ErrorKind kind;
  std::string message;
  int line = 0;
};

struct ValidationResult {
  Locations locations;
  std::vector<Diagnostic> errors;

  bool ok() const { return errors.empty(); }
};

// Static well-formedness of a macro-free program.
ValidationResult validate(const Program& program);

// Throws the first diagnostic as an Error if validation fails.
Locations validate_or_throw(const Program& program);

// parse + expand + validate.
Program load_program(std::string_view text);

}  // namespace dtsim
