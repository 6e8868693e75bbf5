#pragma once

#include <numeric>
#include <unordered_map>
#include <vector>

namespace fr {

// Minimum element is the representative, so labels are deterministic.
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
    return true;
  }

  // Dense labels in order of first appearance.
  std::vector<int> labels() {
    std::vector<int> out(parent_.size());
    std::unordered_map<int, int> ids;
    for (int x = 0; x < static_cast<int>(parent_.size()); ++x) {
      auto [it, fresh] = ids.emplace(find(x), static_cast<int>(ids.size()));
      out[x] = it->second;
    }
    return out;
  }

  int size() const { return static_cast<int>(parent_.size()); }

 private:
  std::vector<int> parent_;
};

}  // namespace fr
