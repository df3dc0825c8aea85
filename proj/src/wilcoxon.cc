#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dtsim/error.h"
#include "dtsim/indep_test.h"

namespace dtsim {
namespace {

struct Ranked {
  std::vector<std::uint64_t> doubled_ranks;  // 2 * average rank, by |difference|
  std::vector<bool> positive;
  double tie_term = 0;  // sum over tie groups of t^3 - t
  std::uint64_t doubled_w = 0;  // 2 * W+
};

Ranked rank(std::span<const ScorePair> pairs) {
  if (pairs.empty()) throw Error(ErrorKind::kInsufficientData, "signed-rank test of zero pairs");
  std::vector<double> d;
  for (const ScorePair& p : pairs) {
    const double diff = p.ideal - p.real;
    if (diff != 0) d.push_back(diff);
  }
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });
  Ranked out;
  out.doubled_ranks.resize(d.size());
  out.positive.resize(d.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && std::fabs(d[order[j]]) == std::fabs(d[order[i]])) ++j;
    // Ranks i+1 .. j share their mean (i+1+j)/2.
    const std::uint64_t doubled = i + 1 + j;
    const double t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) out.doubled_ranks[k] = doubled;
    for (std::size_t k = i; k < j; ++k) {
      out.positive[k] = d[order[k]] > 0;
      if (out.positive[k]) out.doubled_w += doubled;
    }
    i = j;
  }
  return out;
}

double exact_p(const Ranked& r) {
  const std::size_t n = r.doubled_ranks.size();
  if (n == 0) return 1;
  if (n > 62) throw Error(ErrorKind::kInvalidConfig, "exact signed-rank needs at most 62 pairs");
  std::uint64_t total = 0;
  for (std::uint64_t x : r.doubled_ranks) total += x;
  // count[s]: sign patterns whose positive ranks sum to s (doubled).
  std::vector<std::uint64_t> count(total + 1, 0);
  count[0] = 1;
  std::uint64_t reach = 0;
  for (std::uint64_t x : r.doubled_ranks) {
    reach += x;
    for (std::uint64_t s = reach; s >= x; --s) count[s] += count[s - x];
  }
  std::uint64_t tail = 0;
  for (std::uint64_t s = r.doubled_w; s <= total; ++s) tail += count[s];
  return std::ldexp(static_cast<double>(tail), -static_cast<int>(n));
}

double normal_p(const Ranked& r) {
  const double n = static_cast<double>(r.doubled_ranks.size());
  if (n == 0) return 1;
  const double w = static_cast<double>(r.doubled_w) / 2;
  const double mean = n * (n + 1) / 4;
  const double var = n * (n + 1) * (2 * n + 1) / 24 - r.tie_term / 48;
  if (var <= 0) return 1;
  const double z = (w - mean - 0.5) / std::sqrt(var);
  const double p = 0.5 * std::erfc(z / std::sqrt(2.0));
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

}  // namespace

double wilcoxon_exact(std::span<const ScorePair> pairs) { return exact_p(rank(pairs)); }

double wilcoxon_normal(std::span<const ScorePair> pairs) { return normal_p(rank(pairs)); }

double wilcoxon_less(std::span<const ScorePair> pairs) {
  const Ranked r = rank(pairs);
  return r.doubled_ranks.size() <= kWilcoxonExactLimit ? exact_p(r) : normal_p(r);
}

}  // namespace dtsim
