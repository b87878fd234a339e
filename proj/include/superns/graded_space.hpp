#pragma once

#include <map>
#include <string>
#include <vector>

#include "superns/grassmann.hpp"

namespace superns {

// Sparse vectors over a fixed basis, zeros never stored.
using SparseVec = std::map<int, Rational>;
// Sparse matrix by columns: column j is the image of basis vector j.
using SparseMat = std::map<int, SparseVec>;
// Vectors with Grassmann coefficients.
using LVec = std::map<int, Grassmann>;

void axpy(SparseVec& y, const Rational& a, const SparseVec& x);
void axpy(LVec& y, const Grassmann& a, const SparseVec& x);
void axpy(LVec& y, const Grassmann& a, const LVec& x);
SparseVec basis_vec(int i);
LVec to_lvec(const SparseVec& x, int generators);
bool lvec_equal(const LVec& a, const LVec& b);

// Basis of a weight- and sign-graded space. Weights are stored doubled.
struct GradedSpace {
  std::vector<int> weight2;
  std::vector<int> parity;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(weight2.size()); }
  int dim(int w2, int p) const;
  int dim(int w2) const { return dim(w2, 0) + dim(w2, 1); }
  std::vector<int> basis_of_weight(int w2) const;
  int min_weight2() const;
  int max_weight2() const;
  int find(const std::string& label) const;  // -1 if absent
  void validate() const;

  bool operator==(const GradedSpace&) const = default;
};

// Weight (doubled) and parity of a homogeneous vector; throws DomainError
// on mixed input.
int vec_weight2(const GradedSpace& s, const SparseVec& v);
int vec_parity(const GradedSpace& s, const SparseVec& v);

std::string to_string(const GradedSpace& s, const SparseVec& v);

}  // namespace superns
