#include "dtsim/protogen.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>

#include "dtsim/error.h"
#include "dtsim/random.h"

namespace dtsim {

void GenConfig::check() const {
  if (parties < 1 || parties > kMaxParties) {
    throw Error(ErrorKind::kInvalidConfig, "parties must be in 1..64");
  }
  if (max_width < 1) throw Error(ErrorKind::kInvalidConfig, "maxWidth must be at least 1");
  const double w[] = {weights.local, weights.send, weights.oblivious, weights.flip};
  for (double x : w) {
    if (!(x >= 0)) throw Error(ErrorKind::kInvalidConfig, "operation weights must be >= 0");
  }
  if (w[0] + w[1] + w[2] + w[3] <= 0) {
    throw Error(ErrorKind::kInvalidConfig, "operation weights are all zero");
  }
}

std::string party_name(std::size_t index) { return "P" + std::to_string(index + 1); }

namespace {

class Generator {
 public:
  explicit Generator(const GenConfig& cfg) : cfg_(cfg), rng_(derive_seed(cfg.seed, {kTagGen})) {
    flips_.assign(cfg.parties, 0);
    for (std::size_t p = 0; p < cfg.parties; ++p) names_.push_back(party_name(p));
  }

  Program run() {
    for (std::size_t p = 0; p < cfg_.parties; ++p) {
      for (std::size_t i = 0; i < cfg_.secret_bits; ++i) {
        emit_assign(fresh("s"), SecretRhs{names_[p]}, bit(p));
      }
    }
    for (std::size_t i = 0; i < cfg_.body_len; ++i) body_statement();
    std::vector<std::optional<std::string>> zero(cfg_.parties);
    for (std::size_t p = 0; p < cfg_.parties; ++p) {
      if (cfg_.output_bits > 0 && held_by(p).empty()) {
        zero[p] = fresh("z");
        emit_assign(*zero[p], ExprRhs{Expr::constant(false), names_[p]}, bit(p));
      }
    }
    for (std::size_t p = 0; p < cfg_.parties; ++p) {
      for (std::size_t i = 0; i < cfg_.output_bits; ++i) {
        const std::string v = zero[p] ? *zero[p] : pick(held_by(p)).name;
        program_.body.push_back({Output{v, names_[p]}, line()});
      }
    }
    program_.parties = names_;
    return program_;
  }

 private:
  struct Var {
    std::string name;
    PartyMask knowers;
    std::size_t uses = 0;
  };

  static PartyMask bit(std::size_t p) { return PartyMask{1} << p; }
  int line() const { return static_cast<int>(program_.body.size()) + 1; }

  std::string fresh(const char* prefix) { return prefix + std::to_string(counter_++); }

  void emit_assign(const std::string& target, Rhs rhs, PartyMask knowers) {
    program_.body.push_back({Assign{target, std::move(rhs)}, line()});
    vars_.push_back({target, knowers});
  }

  std::vector<std::size_t> held_by(std::size_t p) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].knowers & bit(p)) out.push_back(i);
    }
    return out;
  }

  // Draws from `pool` with weight 1 / (1 + uses) and records the use.
  Var& pick(const std::vector<std::size_t>& pool) {
    std::vector<double> w(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      w[i] = cfg_.usage_bias ? 1.0 / (1.0 + static_cast<double>(vars_[pool[i]].uses)) : 1.0;
    }
    Var& v = vars_[pool[rng_.weighted(w)]];
    ++v.uses;
    return v;
  }

  std::size_t pick_party(const std::vector<std::size_t>& candidates) {
    return candidates[rng_.below(candidates.size())];
  }

  std::vector<std::size_t> parties_holding_something() const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < cfg_.parties; ++p) {
      if (!held_by(p).empty()) out.push_back(p);
    }
    return out;
  }

  void body_statement() {
    const double w[] = {cfg_.weights.local, cfg_.weights.send, cfg_.weights.oblivious,
                        cfg_.weights.flip};
    double enabled[4];
    for (int k = 0; k < 4; ++k) enabled[k] = w[k];
    // Try the drawn kind; infeasible kinds are disabled and redrawn.
    while (true) {
      if (enabled[0] + enabled[1] + enabled[2] + enabled[3] <= 0) {
        const std::size_t p = rng_.below(cfg_.parties);
        emit_assign(fresh("v"), ExprRhs{Expr::constant(rng_.coin()), names_[p]}, bit(p));
        return;
      }
      const std::size_t kind = rng_.weighted(enabled);
      const bool done = kind == 0 ? local() : kind == 1 ? send() : kind == 2 ? oblivious() : flip();
      if (done) return;
      enabled[kind] = 0;
    }
  }

  bool local() {
    const auto parties = parties_holding_something();
    if (parties.empty()) return false;
    const std::size_t p = pick_party(parties);
    const auto pool = held_by(p);
    const std::size_t width = 1 + rng_.below(cfg_.max_width);
    PartyMask knowers = ~PartyMask{0};
    std::optional<Expr> e;
    for (std::size_t i = 0; i < width; ++i) {
      const Var& v = pick(pool);
      knowers &= v.knowers;
      Expr operand = Expr::var(v.name);
      if (rng_.below(4) == 0) operand = Expr::negate(std::move(operand));
      if (!e) {
        e = std::move(operand);
      } else {
        e = rng_.coin() ? Expr::conj(std::move(*e), std::move(operand))
                        : Expr::exclusive(std::move(*e), std::move(operand));
      }
    }
    if (width == 1 && e->kind == Expr::Kind::kVar) e = Expr::negate(std::move(*e));
    emit_assign(fresh("v"), ExprRhs{std::move(*e), std::nullopt}, knowers);
    return true;
  }

  bool send() {
    const PartyMask all = cfg_.parties >= kMaxParties ? ~PartyMask{0}
                                                      : (PartyMask{1} << cfg_.parties) - 1;
    std::vector<std::size_t> senders;
    for (std::size_t p = 0; p < cfg_.parties; ++p) {
      for (std::size_t i : held_by(p)) {
        if ((vars_[i].knowers & all) != all) {
          senders.push_back(p);
          break;
        }
      }
    }
    if (senders.empty()) return false;
    const std::size_t p = pick_party(senders);
    std::vector<std::size_t> pool;
    for (std::size_t i : held_by(p)) {
      if ((vars_[i].knowers & all) != all) pool.push_back(i);
    }
    Var& v = pick(pool);
    std::vector<std::size_t> to;
    for (std::size_t q = 0; q < cfg_.parties; ++q) {
      if (!(v.knowers & bit(q))) to.push_back(q);
    }
    const std::size_t q = pick_party(to);
    v.knowers |= bit(q);
    program_.body.push_back({Send{v.name, names_[q]}, line()});
    return true;
  }

  bool oblivious() {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (sender, receiver)
    const auto holders = parties_holding_something();
    for (std::size_t s : holders) {
      for (std::size_t r : holders) {
        if (s != r) pairs.emplace_back(s, r);
      }
    }
    if (pairs.empty()) return false;
    const auto [s, r] = pairs[rng_.below(pairs.size())];
    const std::string a = pick(held_by(s)).name;
    const std::string b = pick(held_by(s)).name;
    const std::string sel = pick(held_by(r)).name;
    SelectTree table;
    table.selector = sel;
    table.branches = {SelectTree{a, "", {}}, SelectTree{b, "", {}}};
    emit_assign(fresh("t"), ObliviousRhs{std::move(table), names_[r]}, bit(r));
    return true;
  }

  bool flip() {
    std::vector<std::size_t> parties;
    for (std::size_t p = 0; p < cfg_.parties; ++p) {
      if (flips_[p] < cfg_.random_bits) parties.push_back(p);
    }
    if (parties.empty()) return false;
    const std::size_t p = pick_party(parties);
    ++flips_[p];
    emit_assign(fresh("r"), FlipRhs{names_[p]}, bit(p));
    return true;
  }

  const GenConfig& cfg_;
  Rng rng_;
  Program program_;
  std::vector<PartyId> names_;
  std::vector<Var> vars_;
  std::vector<std::size_t> flips_;
  std::size_t counter_ = 0;
};

}  // namespace

Program generate(const GenConfig& cfg) {
  cfg.check();
  Program p = Generator(cfg).run();
  validate_or_throw(p);
  return p;
}

std::uint64_t candidate_seed(std::uint64_t root, std::size_t index) {
  return derive_seed(root, {kTagGen, index});
}

FilterResult filter_stream(const std::function<Program(std::size_t)>& next,
                           const FilterOptions& opts) {
  opts.test.check();
  FilterResult out;
  if (opts.keep == 0) return out;
  const std::size_t threads = std::max<std::size_t>(1, opts.threads);

  auto evaluate = [&](std::size_t i, Program& program, TestReport& report) {
    program = next(i);
    TestConfig cfg = opts.test;
    cfg.seed = derive_seed(opts.test.seed, {kTagFilter, i});
    cfg.threads = 1;
    report = run_test(ProgramViewSource(program, opts.corrupt), cfg);
  };

  std::size_t i = 0;
  while (out.kept.size() < opts.keep) {
    if (i >= opts.max_attempts) {
      throw Error(ErrorKind::kTimeout, "kept " + std::to_string(out.kept.size()) + " of " +
                                           std::to_string(opts.keep) + " programs after " +
                                           std::to_string(i) + " attempts");
    }
    const std::size_t batch = std::min(threads, opts.max_attempts - i);
    std::vector<Program> programs(batch);
    std::vector<TestReport> reports(batch);
    if (batch == 1) {
      evaluate(i, programs[0], reports[0]);
    } else {
      std::vector<std::exception_ptr> errors(batch);
      std::vector<std::thread> pool;
      for (std::size_t k = 0; k < batch; ++k) {
        pool.emplace_back([&, k] {
          try {
            evaluate(i + k, programs[k], reports[k]);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        });
      }
      for (std::thread& t : pool) t.join();
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    // Merge in order and stop at the candidate that completes the quota.
    for (std::size_t k = 0; k < batch && out.kept.size() < opts.keep; ++k, ++i) {
      const TestReport& r = reports[k];
      out.candidates.push_back({i, 0, r.p_value, r.verdict});
      ++out.attempts;
      if (r.verdict == Verdict::kMaybeSecure) {
        out.kept.push_back(std::move(programs[k]));
      } else {
        ++out.rejected;
      }
    }
  }
  return out;
}

FilterResult filter_stream(const GenConfig& cfg, const FilterOptions& opts) {
  cfg.check();
  FilterResult r = filter_stream(
      [&](std::size_t i) {
        GenConfig c = cfg;
        c.seed = candidate_seed(cfg.seed, i);
        return generate(c);
      },
      opts);
  for (FilterCandidate& c : r.candidates) c.seed = candidate_seed(cfg.seed, c.index);
  return r;
}

}  // namespace dtsim
