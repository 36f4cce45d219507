#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace pwlmbqi {

// Union-find with an undo trail (no path compression, so rollback is a plain
// unlink). The ground solver checkpoints before asserting a candidate
// assignment's equalities and rolls back before trying the next one.
class CongruenceClosure {
 public:
  int make_node() {
    parent_.push_back(static_cast<int>(parent_.size()));
    rank_.push_back(0);
    return static_cast<int>(parent_.size()) - 1;
  }

  void ensure(std::size_t n) {
    while (parent_.size() < n) make_node();
  }

  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  bool same(int a, int b) const { return find(a) == find(b); }

  // returns true if the classes were distinct
  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    trail_.push_back({b, rank_[a]});
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

  std::size_t checkpoint() const { return trail_.size(); }

  void rollback(std::size_t mark) {
    while (trail_.size() > mark) {
      auto [child, old_rank] = trail_.back();
      trail_.pop_back();
      rank_[parent_[child]] = old_rank;
      parent_[child] = child;
    }
  }

  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  std::vector<std::pair<int, int>> trail_;  // (re-parented root, winner's old rank)
};

}  // namespace pwlmbqi
