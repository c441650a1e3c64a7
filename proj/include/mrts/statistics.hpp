#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mrts/error.hpp"
#include "mrts/tree_shape.hpp"

namespace mrts {

struct ShapeStats {
  int n = 0;
  int k = 0;                     // internal nodes
  int max_block = 0;             // M
  double avg_block = 0;          // A = (N + K - 1) / K
  std::vector<int> block_sizes;  // children per node, by rank
  std::map<int, int> cherries;   // m -> nodes whose children are m leaves

  int cherry(int m) const {
    const auto it = cherries.find(m);
    return it == cherries.end() ? 0 : it->second;
  }
};

inline ShapeStats shape_stats(const TreeShape& s) {
  ShapeStats st;
  st.n = s.n_tips();
  st.k = s.n_internal();
  int total = 0;
  for (int i = 1; i <= st.k; ++i) {
    const int size = s.internal_children(i) + s.leaves(i);
    st.block_sizes.push_back(size);
    total += size;
    st.max_block = std::max(st.max_block, size);
    if (s.internal_children(i) == 0) ++st.cherries[s.leaves(i)];
  }
  st.avg_block = static_cast<double>(total) / st.k;
  return st;
}

inline const std::vector<int> kDefaultCherrySizes{2, 3, 4, 5, 6};

struct Summary {
  std::uint64_t count = 0;
  int n = 0;
  double mean_k = 0;
  int median_k = 0;
  double mean_max_block = 0;
  int median_max_block = 0;
  double mean_avg_block = 0;
  double median_avg_block = 0;
  std::map<int, double> mean_cherries;    // m -> mean count
  std::map<int, double> scaled_cherries;  // m -> mean count / N
};

// Histogram-backed fold; merge() is associative and commutative so partial
// accumulators from parallel workers combine to the same summary.
class Accumulator {
 public:
  void add(const ShapeStats& s) {
    if (count_ > 0 && s.n != n_) {
      throw DomainError("cannot aggregate shapes with different N");
    }
    n_ = s.n;
    ++count_;
    ++k_hist_[s.k];
    ++m_hist_[s.max_block];
    for (const auto& [m, c] : s.cherries) cherry_sum_[m] += c;
  }

  void add(const TreeShape& s) { add(shape_stats(s)); }

  void merge(const Accumulator& o) {
    if (o.count_ == 0) return;
    if (count_ > 0 && o.n_ != n_) {
      throw DomainError("cannot aggregate shapes with different N");
    }
    n_ = o.n_;
    count_ += o.count_;
    for (const auto& [k, c] : o.k_hist_) k_hist_[k] += c;
    for (const auto& [m, c] : o.m_hist_) m_hist_[m] += c;
    for (const auto& [m, c] : o.cherry_sum_) cherry_sum_[m] += c;
  }

  std::uint64_t count() const { return count_; }

  Summary summary(const std::vector<int>& cherry_sizes =
                      kDefaultCherrySizes) const {
    if (count_ == 0) throw DomainError("cannot summarise an empty sample");
    Summary s;
    s.count = count_;
    s.n = n_;
    const double cnt = static_cast<double>(count_);
    double sum_k = 0, sum_m = 0, sum_a = 0;
    for (const auto& [k, c] : k_hist_) {
      sum_k += static_cast<double>(k) * static_cast<double>(c);
      sum_a += avg_block(k) * static_cast<double>(c);
    }
    for (const auto& [m, c] : m_hist_) {
      sum_m += static_cast<double>(m) * static_cast<double>(c);
    }
    s.mean_k = sum_k / cnt;
    s.mean_max_block = sum_m / cnt;
    s.mean_avg_block = sum_a / cnt;
    s.median_k = lower_median(k_hist_);
    s.median_max_block = lower_median(m_hist_);
    // A decreases in K, so the lower median of A sits at the upper median
    // of K.
    s.median_avg_block = avg_block(upper_median(k_hist_));
    for (int m : cherry_sizes) {
      const auto it = cherry_sum_.find(m);
      const double total =
          it == cherry_sum_.end() ? 0.0 : static_cast<double>(it->second);
      s.mean_cherries[m] = total / cnt;
      s.scaled_cherries[m] = total / cnt / n_;
    }
    return s;
  }

 private:
  double avg_block(int k) const {
    return static_cast<double>(n_ + k - 1) / static_cast<double>(k);
  }

  // Value at 1-based position ceil(count/2) of the sorted sample.
  int lower_median(const std::map<int, std::uint64_t>& h) const {
    return nth_value(h, (count_ + 1) / 2);
  }

  // Value at 1-based position floor(count/2) + 1.
  int upper_median(const std::map<int, std::uint64_t>& h) const {
    return nth_value(h, count_ / 2 + 1);
  }

  static int nth_value(const std::map<int, std::uint64_t>& h,
                       std::uint64_t pos) {
    std::uint64_t seen = 0;
    for (const auto& [v, c] : h) {
      seen += c;
      if (seen >= pos) return v;
    }
    return h.rbegin()->first;
  }

  std::uint64_t count_ = 0;
  int n_ = 0;
  std::map<int, std::uint64_t> k_hist_;
  std::map<int, std::uint64_t> m_hist_;
  std::map<int, std::uint64_t> cherry_sum_;
};

template <class Range>
Summary aggregate(const Range& shapes,
                  const std::vector<int>& cherry_sizes = kDefaultCherrySizes) {
  Accumulator acc;
  for (const auto& s : shapes) acc.add(s);
  return acc.summary(cherry_sizes);
}

}  // namespace mrts
