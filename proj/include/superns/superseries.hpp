#pragma once

#include <map>
#include <string>
#include <utility>

#include "superns/laurent.hpp"

namespace superns {

// p(z) + θ q(z), θ on the left.
struct SuperFn {
  Laurent p;
  Laurent q;

  SuperFn() = default;
  SuperFn(int generators, Window w) : p(generators, w), q(generators, w) {}
  SuperFn(Laurent p_, Laurent q_) : p(std::move(p_)), q(std::move(q_)) {}

  static SuperFn z(int generators, Window w);
  static SuperFn theta(int generators, Window w);
  static SuperFn constant(const Grassmann& c, Window w);

  int generators() const { return p.generators(); }
  const Window& window() const { return p.window(); }
  bool known_zero() const { return p.known_zero() && q.known_zero(); }

  SuperFn& operator+=(const SuperFn& o);
  SuperFn& operator-=(const SuperFn& o);
  SuperFn operator-() const;
};

inline SuperFn operator+(SuperFn a, const SuperFn& b) { return a += b; }
inline SuperFn operator-(SuperFn a, const SuperFn& b) { return a -= b; }
SuperFn operator*(const SuperFn& a, const SuperFn& b);
SuperFn operator*(const Grassmann& c, const SuperFn& a);
SuperFn operator*(const SuperFn& a, const Grassmann& c);

// (−1)^{parity} on coefficients and on θ.
SuperFn involute(const SuperFn& a);
SuperFn dz(const SuperFn& a);
SuperFn ss_D(const SuperFn& a);
// F(Z) for a θ-independent F and even-valued Z = f + θξ.
SuperFn compose_even(const Laurent& F, const SuperFn& Z);
std::string to_string(const SuperFn& a);

// H(z,θ) = (z̃, θ̃) with z̃ = f + θξ even-valued and θ̃ = ψ + θg odd-valued.
struct SuperSeries {
  SuperFn zt;
  SuperFn tt;

  int generators() const { return zt.generators(); }
  const Window& window() const { return zt.window(); }
};

struct CoordData {
  Grassmann a0;
  std::map<int, Grassmann> A;  // j -> A_j
  std::map<int, Grassmann> M;  // j -> M_{j-1/2}
  Branch branch = Branch::plus;

  static CoordData trivial(int generators);
  int generators() const { return a0.generators(); }
  void validate() const;
  bool operator==(const CoordData& o) const;
};

struct InfCoordData {
  std::map<int, Grassmann> B;  // j -> B_j
  std::map<int, Grassmann> N;  // j -> N_{j-1/2}
  bool sk0_constraint = false;

  void validate(int generators) const;
  bool operator==(const InfCoordData& o) const;
};

SuperSeries ss_identity(int generators, Window w = {});
// I(z,θ) = (1/z, iθ/z)
SuperSeries ss_I(int generators, Window w = {});
SuperSeries ss_I_inverse(int generators, Window w = {});
// J(z,θ) = (z, −θ)
SuperSeries ss_J(int generators, Window w = {});
SuperSeries ss_scaling(const Grassmann& a0, Branch branch, Window w = {});

SuperSeries ss_compose(const SuperSeries& H1, const SuperSeries& H2);
SuperSeries ss_invert(const SuperSeries& H);
SuperSeries ss_from_components(const Laurent& f, const Laurent& psi, Branch branch);
std::pair<bool, SuperSeries> ss_is_superconformal(const SuperSeries& H);
SuperSeries ss_exp_zero(const CoordData& c, Window w = {});
SuperSeries ss_exp_infinity(const InfCoordData& c, int generators, Window w = {});
CoordData ss_extract_zero(const SuperSeries& H);
std::pair<Grassmann, Grassmann> ss_evaluate(const SuperSeries& H, const Grassmann& z, const Grassmann& theta);

// Both components agree on every known coefficient.
bool known_equal(const SuperSeries& a, const SuperSeries& b);
bool known_zero(const SuperSeries& a);
std::string to_string(const SuperSeries& H);

// The infinitesimal transformations at t = s = 1, written as derivations
// of the function algebra: ℓ(n) = −L(n)_1, γ(n+½) = −G(n+½)_{1,1}.
SuperFn apply_ell(int n, const Grassmann& coeff, const SuperFn& F);
SuperFn apply_gamma(int n, const Grassmann& odd_coeff, const SuperFn& F);

}  // namespace superns
