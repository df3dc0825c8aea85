#include "dtsim/mutator.h"

#include <algorithm>
#include <charconv>
#include <set>

#include "dtsim/compile.h"
#include "dtsim/error.h"
#include "dtsim/random.h"

namespace dtsim {

const char* to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::kBiasedSharing: return "biased_sharing";
    case MutationKind::kBiasedAnd: return "biased_and";
    case MutationKind::kAccidentalSecret: return "accidental_secret";
    case MutationKind::kAccidentalGate: return "accidental_gate";
  }
  return "?";
}

namespace {

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw Error(ErrorKind::kInvalidConfig,
                "mutation field '" + std::string(key) + "' needs a non-negative integer, got '" +
                    std::string(v) + "'");
  }
  return out;
}

}  // namespace

MutationSpec parse_mutation_spec(std::string_view text) {
  MutationSpec spec;
  bool have_kind = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kInvalidConfig, "mutation field '" + std::string(item) +
                                                 "' is not key=value");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view val = item.substr(eq + 1);
    if (key == "kind") {
      have_kind = true;
      bool found = false;
      for (MutationKind k : {MutationKind::kBiasedSharing, MutationKind::kBiasedAnd,
                             MutationKind::kAccidentalSecret, MutationKind::kAccidentalGate}) {
        if (val == to_string(k)) {
          spec.kind = k;
          found = true;
        }
      }
      if (!found) {
        throw Error(ErrorKind::kInvalidConfig,
                    "unknown mutation kind '" + std::string(val) +
                        "' (biased_sharing, biased_and, accidental_secret, accidental_gate)");
      }
    } else if (key == "b") {
      const std::uint64_t b = parse_uint(key, val);
      if (b < 1 || b > 64) throw Error(ErrorKind::kInvalidConfig, "bias b must be in 1..64");
      spec.bias = static_cast<std::uint32_t>(b);
    } else if (key == "sites") {
      if (val == "all") {
        spec.all_sites = true;
        spec.sites.clear();
      } else {
        spec.all_sites = false;
        spec.sites.clear();
        std::size_t p = 0;
        while (p <= val.size()) {
          std::size_t e = val.find(':', p);
          if (e == std::string_view::npos) e = val.size();
          spec.sites.push_back(parse_uint(key, val.substr(p, e - p)));
          p = e + 1;
        }
      }
    } else if (key == "pick") {
      spec.pick = parse_uint(key, val);
    } else if (key == "seed") {
      spec.seed = parse_uint(key, val);
    } else if (key == "honest") {
      spec.honest = std::string(val);
    } else if (key == "corrupt") {
      spec.corrupt = std::string(val);
    } else {
      throw Error(ErrorKind::kInvalidConfig, "unknown mutation field '" + std::string(key) + "'");
    }
  }
  if (!have_kind) throw Error(ErrorKind::kInvalidConfig, "mutation spec needs kind=...");
  return spec;
}

std::string format_mutation_spec(const MutationSpec& spec) {
  std::string out = std::string("kind=") + to_string(spec.kind) + ",b=" + std::to_string(spec.bias);
  if (spec.all_sites) {
    out += ",sites=all";
  } else {
    out += ",sites=";
    for (std::size_t i = 0; i < spec.sites.size(); ++i) {
      if (i) out += ':';
      out += std::to_string(spec.sites[i]);
    }
  }
  if (spec.pick) out += ",pick=" + std::to_string(spec.pick);
  out += ",seed=" + std::to_string(spec.seed) + ",honest=" + spec.honest +
         ",corrupt=" + spec.corrupt;
  return out;
}

std::vector<std::size_t> select_sites(const MutationSpec& spec, std::size_t available) {
  std::vector<std::size_t> pool;
  if (spec.all_sites) {
    for (std::size_t i = 0; i < available; ++i) pool.push_back(i);
  } else {
    std::set<std::size_t> uniq(spec.sites.begin(), spec.sites.end());
    for (std::size_t s : uniq) {
      if (s >= available) {
        throw Error(ErrorKind::kNoSuchSite, "site " + std::to_string(s) + " does not exist; " +
                                                std::to_string(available) + " available");
      }
      pool.push_back(s);
    }
  }
  if (spec.pick > 0) {
    if (spec.pick > pool.size()) {
      throw Error(ErrorKind::kNoSuchSite, "cannot pick " + std::to_string(spec.pick) +
                                              " sites out of " + std::to_string(pool.size()));
    }
    Rng rng(derive_seed(spec.seed, {kTagSites}));
    for (std::size_t i = 0; i < spec.pick; ++i) {
      std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    }
    pool.resize(spec.pick);
    std::sort(pool.begin(), pool.end());
  }
  if (pool.empty()) {
    throw Error(ErrorKind::kNoSuchSite,
                std::string("no site for mutation ") + to_string(spec.kind));
  }
  return pool;
}

Program mutate(const Circuit& c, const CompileOptions& opts, const MutationSpec& spec) {
  CompileOptions o = opts;
  o.mutation = spec;
  return compile(c, o);
}

Program mutate_program(const Program& program, const MutationSpec& spec) {
  if (spec.kind != MutationKind::kAccidentalSecret) {
    throw Error(ErrorKind::kIncompatibleKind,
                std::string(to_string(spec.kind)) +
                    " needs compiler sites; plain programs support only accidental_secret");
  }
  Program p = program.macros.empty() ? program : expand_macros(program);
  const Locations loc = validate_or_throw(p);
  if (loc.party_index(spec.honest) < 0 || loc.party_index(spec.corrupt) < 0 ||
      spec.honest == spec.corrupt) {
    throw Error(ErrorKind::kIncompatibleKind,
                "honest and corrupt must be two distinct parties of the program");
  }
  std::vector<std::size_t> secrets;  // body indices
  for (std::size_t i = 0; i < p.body.size(); ++i) {
    const auto* a = std::get_if<Assign>(&p.body[i].node);
    if (!a) continue;
    const auto* s = std::get_if<SecretRhs>(&a->rhs);
    if (s && s->party == spec.honest) secrets.push_back(i);
  }
  const std::vector<std::size_t> chosen = select_sites(spec, secrets.size());

  std::set<std::string> used;
  for (const auto& [v, m] : loc.knowers) used.insert(v);
  auto fresh = [&](const std::string& base) {
    std::string n = base;
    while (used.count(n)) n += "_";
    used.insert(n);
    return n;
  };

  std::vector<Stmt> body;
  std::size_t next = 0;
  for (std::size_t i = 0; i < p.body.size(); ++i) {
    body.push_back(p.body[i]);
    if (next >= chosen.size() || secrets[chosen[next]] != i) continue;
    ++next;
    const int line = p.body[i].line;
    const std::string x = std::get<Assign>(p.body[i].node).target;
    const std::string m = fresh("leak_" + x);
    std::vector<std::string> flips;
    for (std::uint32_t j = 0; j < spec.bias; ++j) {
      flips.push_back(fresh(m + "_c" + std::to_string(j)));
      body.push_back(Stmt{Assign{flips.back(), FlipRhs{spec.honest}}, line});
    }
    Expr coin = Expr::var(flips[0]);
    for (std::size_t j = 1; j < flips.size(); ++j) coin = Expr::conj(coin, Expr::var(flips[j]));
    body.push_back(Stmt{Assign{m, ExprRhs{Expr::exclusive(Expr::var(x), coin), std::nullopt}},
                        line});
    body.push_back(Stmt{Send{m, spec.corrupt}, line});
  }
  p.body = std::move(body);
  validate_or_throw(p);
  return p;
}

}  // namespace dtsim
