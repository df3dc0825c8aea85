#include <algorithm>
#include <numeric>

#include "dtsim/error.h"
#include "dtsim/indep_test.h"

namespace dtsim {

std::uint8_t DTree::predict(std::span<const std::uint8_t> row) const {
  std::uint32_t at = 0;
  while (nodes[at].feature >= 0) {
    at = row[static_cast<std::size_t>(nodes[at].feature)] ? nodes[at].child1 : nodes[at].child0;
  }
  return nodes[at].label;
}

std::size_t DTree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[nodes[i].child0] = d[i] + 1;
      d[nodes[i].child1] = d[i] + 1;
    }
  }
  return best;
}

std::size_t DTree::leaves() const {
  std::size_t n = 0;
  for (const Node& node : nodes) n += node.feature < 0;
  return n;
}

namespace {

// Weighted Gini impurity is minimized by maximizing
//   sum over children of (pos^2 + neg^2) / size,
// kept as an exact fraction num / den.
struct Split {
  unsigned __int128 num = 0;
  unsigned __int128 den = 1;
  bool better_than(const Split& o) const { return num * o.den > o.num * den; }
};

}  // namespace

DTree train_tree(const BitMatrix& x, std::span<const std::uint8_t> y) {
  const std::size_t n = x.rows();
  const std::size_t f_count = x.cols();
  if (n == 0) throw Error(ErrorKind::kEmptyTrainingSet, "cannot train on zero rows");
  if (y.size() != n) {
    throw Error(ErrorKind::kWidthMismatch, "label count differs from feature row count");
  }
  DTree tree;
  tree.features = f_count;
  tree.nodes.emplace_back();

  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::vector<std::uint32_t> ones(f_count);
  std::vector<std::uint32_t> ones_pos(f_count);

  struct Work {
    std::uint32_t node;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Work> stack{{0, 0, n}};
  while (!stack.empty()) {
    const Work w = stack.back();
    stack.pop_back();
    const std::size_t size = w.end - w.begin;
    std::uint64_t pos = 0;
    for (std::size_t r = w.begin; r < w.end; ++r) pos += y[idx[r]] & 1;
    tree.nodes[w.node].label = 2 * pos > size ? 1 : 0;
    if (pos == 0 || pos == size || size < 2) continue;

    std::fill(ones.begin(), ones.end(), 0);
    std::fill(ones_pos.begin(), ones_pos.end(), 0);
    for (std::size_t r = w.begin; r < w.end; ++r) {
      const std::uint8_t* row = x.row(idx[r]).data();
      std::uint32_t* o = ones.data();
      for (std::size_t f = 0; f < f_count; ++f) o[f] += row[f];
      if (y[idx[r]] & 1) {
        std::uint32_t* op = ones_pos.data();
        for (std::size_t f = 0; f < f_count; ++f) op[f] += row[f];
      }
    }

    std::int64_t best_f = -1;
    Split best;
    for (std::size_t f = 0; f < f_count; ++f) {
      const std::uint64_t n1 = ones[f];
      const std::uint64_t n0 = size - n1;
      if (n0 == 0 || n1 == 0) continue;
      const std::uint64_t p1 = ones_pos[f];
      const std::uint64_t p0 = pos - p1;
      const std::uint64_t q0 = n0 - p0;
      const std::uint64_t q1 = n1 - p1;
      Split s;
      s.num = static_cast<unsigned __int128>(p0 * p0 + q0 * q0) * n1 +
              static_cast<unsigned __int128>(p1 * p1 + q1 * q1) * n0;
      s.den = static_cast<unsigned __int128>(n0) * n1;
      if (best_f < 0 || s.better_than(best)) {
        best = s;
        best_f = static_cast<std::int64_t>(f);
      }
    }
    if (best_f < 0) continue;

    const auto f = static_cast<std::size_t>(best_f);
    const auto mid = std::stable_partition(
        idx.begin() + static_cast<std::ptrdiff_t>(w.begin),
        idx.begin() + static_cast<std::ptrdiff_t>(w.end),
        [&](std::uint32_t r) { return x.at(r, f) == 0; });
    const auto split = static_cast<std::size_t>(mid - idx.begin());
    const auto c0 = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    DTree::Node& node = tree.nodes[w.node];
    node.feature = static_cast<std::int32_t>(f);
    node.child0 = c0;
    node.child1 = c0 + 1;
    stack.push_back({c0 + 1, split, w.end});
    stack.push_back({c0, w.begin, split});
  }
  return tree;
}

Forest train_forest(const BitMatrix& features, const BitMatrix& labels) {
  if (features.rows() != labels.rows()) {
    throw Error(ErrorKind::kWidthMismatch, "feature and label row counts differ");
  }
  if (features.rows() == 0) throw Error(ErrorKind::kEmptyTrainingSet, "cannot train on zero rows");
  Forest forest;
  forest.features = features.cols();
  std::vector<std::uint8_t> column(labels.rows());
  for (std::size_t l = 0; l < labels.cols(); ++l) {
    for (std::size_t r = 0; r < labels.rows(); ++r) column[r] = labels.at(r, l);
    forest.trees.push_back(train_tree(features, column));
  }
  return forest;
}

double score(const Forest& model, const BitMatrix& features, const BitMatrix& labels) {
  if (features.cols() != model.features || labels.cols() != model.trees.size() ||
      features.rows() != labels.rows()) {
    throw Error(ErrorKind::kWidthMismatch,
                "test data is " + std::to_string(features.cols()) + " features x " +
                    std::to_string(labels.cols()) + " labels, model expects " +
                    std::to_string(model.features) + " x " + std::to_string(model.trees.size()));
  }
  std::uint64_t wrong = 0;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto row = features.row(r);
    for (std::size_t l = 0; l < model.trees.size(); ++l) {
      wrong += model.trees[l].predict(row) != labels.at(r, l);
    }
  }
  return static_cast<double>(wrong) + kScoreEpsilon;
}

}  // namespace dtsim
