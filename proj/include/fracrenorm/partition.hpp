#pragma once

#include <functional>
#include <vector>

namespace fr {

// Equivalence relation on 0..size-1. Labels are canonical: blocks are
// numbered by their minimum element.
class Partition {
 public:
  Partition() = default;
  static Partition from_labels(const std::vector<int>& labels);
  static Partition from_blocks(int size, const std::vector<std::vector<int>>& blocks);
  static Partition singletons(int size);
  static Partition full(int size);

  int size() const { return static_cast<int>(labels_.size()); }
  int num_blocks() const { return num_blocks_; }
  int block_of(int x) const { return labels_[x]; }
  const std::vector<int>& labels() const { return labels_; }
  std::vector<std::vector<int>> blocks() const;
  bool same_block(int x, int y) const { return labels_[x] == labels_[y]; }
  bool is_trivial() const { return num_blocks_ <= 1 || num_blocks_ == size(); }
  // every block of *this lies inside a block of other
  bool refines(const Partition& other) const;
  bool invariant_under(const std::vector<int>& perm) const;

  bool operator==(const Partition& o) const { return labels_ == o.labels_; }
  bool operator<(const Partition& o) const { return labels_ < o.labels_; }

 private:
  std::vector<int> labels_;
  int num_blocks_ = 0;
};

// Bell number, saturating at ~9e18.
unsigned long long bell_number(int n);

// Visits every partition of 0..n-1 as a restricted growth string, in
// lexicographic order. Returning false from the visitor stops the walk.
void for_each_rgs(int n, const std::function<bool(const std::vector<int>&)>& visit);
// Same, restricted to strings starting with `prefix`.
void for_each_rgs_with_prefix(int n, const std::vector<int>& prefix,
                              const std::function<bool(const std::vector<int>&)>& visit);

}  // namespace fr
