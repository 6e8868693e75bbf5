#include "fracrenorm/partition.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "fracrenorm/error.hpp"

namespace fr {

Partition Partition::from_labels(const std::vector<int>& labels) {
  Partition p;
  p.labels_.resize(labels.size());
  std::unordered_map<int, int> seen;  // raw label -> canonical
  for (size_t x = 0; x < labels.size(); ++x) {
    auto [it, fresh] = seen.emplace(labels[x], static_cast<int>(seen.size()));
    p.labels_[x] = it->second;
  }
  p.num_blocks_ = static_cast<int>(seen.size());
  return p;
}

Partition Partition::from_blocks(int size, const std::vector<std::vector<int>>& blocks) {
  std::vector<int> lab(size, -1);
  for (size_t b = 0; b < blocks.size(); ++b)
    for (int x : blocks[b]) {
      if (x < 0 || x >= size) throw Error(ErrorCode::InvalidInput, "block element out of range");
      if (lab[x] >= 0) throw Error(ErrorCode::InvalidInput, "blocks overlap");
      lab[x] = static_cast<int>(b);
    }
  int next = static_cast<int>(blocks.size());
  for (auto& l : lab)
    if (l < 0) l = next++;  // uncovered elements become singletons
  return from_labels(lab);
}

Partition Partition::singletons(int size) {
  std::vector<int> lab(size);
  for (int i = 0; i < size; ++i) lab[i] = i;
  return from_labels(lab);
}

Partition Partition::full(int size) { return from_labels(std::vector<int>(size, 0)); }

std::vector<std::vector<int>> Partition::blocks() const {
  std::vector<std::vector<int>> out(num_blocks_);
  for (int x = 0; x < size(); ++x) out[labels_[x]].push_back(x);
  return out;
}

bool Partition::refines(const Partition& other) const {
  std::vector<int> target(num_blocks_, -1);
  for (int x = 0; x < size(); ++x) {
    int& t = target[labels_[x]];
    if (t < 0) t = other.labels_[x];
    else if (t != other.labels_[x]) return false;
  }
  return true;
}

bool Partition::invariant_under(const std::vector<int>& perm) const {
  // x ~ y  =>  perm x ~ perm y, checked against block representatives
  std::vector<int> image(num_blocks_, -1);
  for (int x = 0; x < size(); ++x) {
    int& t = image[labels_[x]];
    int l = labels_[perm[x]];
    if (t < 0) t = l;
    else if (t != l) return false;
  }
  return true;
}

unsigned long long bell_number(int n) {
  // Bell triangle
  std::vector<unsigned long long> row{1};
  const auto cap = std::numeric_limits<unsigned long long>::max() / 2;
  for (int i = 0; i < n; ++i) {
    std::vector<unsigned long long> next{row.back()};
    for (auto v : row) next.push_back(std::min(cap, next.back() + v));
    row = std::move(next);
  }
  return row.front();
}

namespace {

bool rgs_rec(std::vector<int>& a, int pos, int maxv,
             const std::function<bool(const std::vector<int>&)>& visit) {
  if (pos == static_cast<int>(a.size())) return visit(a);
  for (int v = 0; v <= maxv + 1; ++v) {
    a[pos] = v;
    if (!rgs_rec(a, pos + 1, std::max(maxv, v), visit)) return false;
  }
  return true;
}

}  // namespace

void for_each_rgs(int n, const std::function<bool(const std::vector<int>&)>& visit) {
  for_each_rgs_with_prefix(n, {}, visit);
}

void for_each_rgs_with_prefix(int n, const std::vector<int>& prefix,
                              const std::function<bool(const std::vector<int>&)>& visit) {
  if (n == 0) {
    visit({});
    return;
  }
  std::vector<int> a(n, 0);
  int maxv = -1;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] > maxv + 1) throw Error(ErrorCode::InvalidInput, "prefix is not a restricted growth string");
    a[i] = prefix[i];
    maxv = std::max(maxv, prefix[i]);
  }
  rgs_rec(a, static_cast<int>(prefix.size()), maxv, visit);
}

}  // namespace fr
