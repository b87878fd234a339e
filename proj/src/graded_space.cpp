#include "superns/graded_space.hpp"

#include <algorithm>
#include <sstream>

#include "superns/errors.hpp"

namespace superns {

void axpy(SparseVec& y, const Rational& a, const SparseVec& x) {
  if (sgn(a) == 0) return;
  for (const auto& [i, v] : x) {
    auto it = y.find(i);
    if (it == y.end()) {
      y.emplace(i, a * v);
    } else {
      it->second += a * v;
      if (sgn(it->second) == 0) y.erase(it);
    }
  }
}

void axpy(LVec& y, const Grassmann& a, const SparseVec& x) {
  if (a.is_zero()) return;
  for (const auto& [i, v] : x) {
    Grassmann t = a * CRational(v);
    auto it = y.find(i);
    if (it == y.end()) {
      if (!t.is_zero()) y.emplace(i, std::move(t));
    } else {
      it->second += t;
      if (it->second.is_zero()) y.erase(it);
    }
  }
}

void axpy(LVec& y, const Grassmann& a, const LVec& x) {
  if (a.is_zero()) return;
  for (const auto& [i, v] : x) {
    Grassmann t = a * v;
    if (t.is_zero()) continue;
    auto it = y.find(i);
    if (it == y.end()) {
      y.emplace(i, std::move(t));
    } else {
      it->second += t;
      if (it->second.is_zero()) y.erase(it);
    }
  }
}

SparseVec basis_vec(int i) { return SparseVec{{i, Rational(1)}}; }

LVec to_lvec(const SparseVec& x, int generators) {
  LVec out;
  for (const auto& [i, v] : x) out.emplace(i, Grassmann::scalar(CRational(v), generators));
  return out;
}

bool lvec_equal(const LVec& a, const LVec& b) {
  auto clean = [](const LVec& x) {
    LVec r;
    for (const auto& [i, v] : x)
      if (!v.is_zero()) r.emplace(i, v);
    return r;
  };
  return clean(a) == clean(b);
}

int GradedSpace::dim(int w2, int p) const {
  int n = 0;
  for (int i = 0; i < size(); ++i)
    if (weight2[i] == w2 && parity[i] == p) ++n;
  return n;
}

std::vector<int> GradedSpace::basis_of_weight(int w2) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (weight2[i] == w2) out.push_back(i);
  return out;
}

int GradedSpace::min_weight2() const {
  if (weight2.empty()) throw DimensionError("empty graded space");
  return *std::min_element(weight2.begin(), weight2.end());
}

int GradedSpace::max_weight2() const {
  if (weight2.empty()) throw DimensionError("empty graded space");
  return *std::max_element(weight2.begin(), weight2.end());
}

int GradedSpace::find(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (labels[i] == label) return i;
  return -1;
}

void GradedSpace::validate() const {
  if (parity.size() != weight2.size() || labels.size() != weight2.size())
    throw SchemaError("graded space: weight, parity and label lists differ in length");
  for (int p : parity)
    if (p != 0 && p != 1) throw SchemaError("graded space: parity must be 0 or 1");
}

int vec_weight2(const GradedSpace& s, const SparseVec& v) {
  if (v.empty()) throw DomainError("weight of the zero vector");
  int w = s.weight2.at(v.begin()->first);
  for (const auto& [i, c] : v)
    if (s.weight2.at(i) != w) throw DomainError("vector is not weight-homogeneous");
  return w;
}

int vec_parity(const GradedSpace& s, const SparseVec& v) {
  if (v.empty()) return 0;
  int p = s.parity.at(v.begin()->first);
  for (const auto& [i, c] : v)
    if (s.parity.at(i) != p) throw DomainError("vector is not sign-homogeneous");
  return p;
}

std::string to_string(const GradedSpace& s, const SparseVec& v) {
  if (v.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, c] : v) {
    if (!first) os << " + ";
    first = false;
    if (c != 1) os << to_string(c) << "*";
    os << "[" << s.labels.at(i) << "]";
  }
  return os.str();
}

}  // namespace superns
