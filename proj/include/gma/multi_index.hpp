#pragma once

#include <vector>

namespace gma {

// Strictly increasing index tuple into {0, .., n-1}; the basis labels of
// Lambda^p. Tuples are enumerated in lexicographic order throughout.
using MultiIndex = std::vector<int>;

// All increasing p-tuples of {0, .., n-1}, lexicographic.
const std::vector<MultiIndex>& index_tuples(int n, int p);

// Ordinal of `t` within index_tuples(n, p).
int tuple_rank(int n, const MultiIndex& t);

long long binomial(int n, int k);

// Sign of the permutation sorting concat(a, b) into increasing order,
// 0 if the tuples share an index. `merged` (optional) receives the union.
int merge_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex* merged = nullptr);

// One bilinear contribution of a (p,p) x (q,q) wedge product expressed in
// the Hermitian coefficient representation:
//   out(out_row, out_col) += sign * a(a_row, a_col) * b(b_row, b_col).
// Tables enumerate only out_row <= out_col; the lower triangle follows by
// conjugation.
struct WedgeTerm {
  int out_row, out_col;
  int a_row, a_col;
  int b_row, b_col;
  double sign;
};

// Cached contraction table for wedging degrees (p, q) in dimension n.
const std::vector<WedgeTerm>& wedge_table(int n, int p, int q);

}  // namespace gma
