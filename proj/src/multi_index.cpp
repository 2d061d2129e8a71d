#include "gma/multi_index.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gma {

namespace {

std::vector<MultiIndex> build_tuples(int n, int p) {
  if (p < 0 || p > n) throw std::invalid_argument("index_tuples: degree out of range");
  std::vector<MultiIndex> out;
  MultiIndex cur(p);
  // iterative lexicographic enumeration
  for (int i = 0; i < p; ++i) cur[i] = i;
  if (p == 0) {
    out.push_back({});
    return out;
  }
  while (true) {
    out.push_back(cur);
    int i = p - 1;
    while (i >= 0 && cur[i] == n - p + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < p; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

std::mutex cache_mutex;

}  // namespace

const std::vector<MultiIndex>& index_tuples(int n, int p) {
  static std::map<std::pair<int, int>, std::vector<MultiIndex>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_pair(n, p);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_tuples(n, p)).first;
  return it->second;
}

int tuple_rank(int n, const MultiIndex& t) {
  const auto& all = index_tuples(n, static_cast<int>(t.size()));
  auto it = std::find(all.begin(), all.end(), t);
  if (it == all.end()) throw std::invalid_argument("tuple_rank: not an increasing tuple");
  return static_cast<int>(it - all.begin());
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int merge_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex* merged) {
  int inversions = 0;
  for (int x : a)
    for (int y : b) {
      if (x == y) return 0;
      if (x > y) ++inversions;
    }
  if (merged) {
    merged->resize(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), merged->begin());
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

const std::vector<WedgeTerm>& wedge_table(int n, int p, int q) {
  static std::map<std::tuple<int, int, int>, std::vector<WedgeTerm>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_tuple(n, p, q);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  if (p + q > n) throw std::invalid_argument("wedge_table: degree overflow");
  const auto& ta = build_tuples(n, p);
  const auto& tb = build_tuples(n, q);
  const auto& tout = build_tuples(n, p + q);
  auto rank_of = [&](const MultiIndex& t) {
    return static_cast<int>(std::find(tout.begin(), tout.end(), t) - tout.begin());
  };

  std::vector<WedgeTerm> terms;
  MultiIndex m1, m2;
  for (int ai = 0; ai < static_cast<int>(ta.size()); ++ai)
    for (int ki = 0; ki < static_cast<int>(tb.size()); ++ki) {
      int s1 = merge_sign(ta[ai], tb[ki], &m1);
      if (s1 == 0) continue;
      int row = rank_of(m1);
      for (int aj = 0; aj < static_cast<int>(ta.size()); ++aj)
        for (int kj = 0; kj < static_cast<int>(tb.size()); ++kj) {
          int s2 = merge_sign(ta[aj], tb[kj], &m2);
          if (s2 == 0) continue;
          int col = rank_of(m2);
          if (row > col) continue;  // lower triangle by conjugation
          terms.push_back({row, col, ai, aj, ki, kj, static_cast<double>(s1 * s2)});
        }
    }
  return cache.emplace(key, std::move(terms)).first->second;
}

}  // namespace gma
