#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace cohset {

/// Continuous piecewise-linear circle map with almost-invariant halves
/// [0,1/2] and [1/2,1] for small `a`. Five branches of slope +-3, mod 1.
double eval_H(double a, double x);

/// x + shift reduced into [0,1).
double rotate(double x, double shift);

/// Slope-3 Markov map on the 6-box partition of the circle:
/// T(x) = 3x - (i-1)/2 + a_i/6 (mod 1) for x in box i (1-based).
double eval_markov(const std::array<int, 6>& offsets, double x);

enum class MapFamilyKind { single, periodic3, aperiodic4 };

std::string_view to_string(MapFamilyKind kind);
MapFamilyKind map_family_from_string(std::string_view name);

/// A finite collection of circle maps indexed by 1-based symbols.
class MapFamily {
 public:
  /// One Markov map; default offsets (0,0,1,4,3,3).
  static MapFamily single(std::array<int, 6> offsets = {0, 0, 1, 4, 3, 3});
  /// Three Markov maps composed cyclically 1 -> 2 -> 3 -> 1.
  static MapFamily periodic3();
  /// T1 = H_a1, T2 = R H_a2, T3 = H_a3 R^-1, T4 = R H_a4 R^-1 with R a
  /// quarter rotation. Default perturbations (pi, 2 sqrt2, sqrt3, e)/40.
  static MapFamily aperiodic4();
  static MapFamily aperiodic4(std::array<double, 4> perturbations);

  MapFamilyKind kind() const { return kind_; }
  int symbol_count() const;

  /// T_symbol(x) for x in [0,1). Unknown symbol throws ConfigError.
  double operator()(int symbol, double x) const;

  /// Subshift adjacency M[i][j] (0-based) of admissible successive symbols.
  std::vector<std::vector<int>> adjacency() const;

  const std::vector<std::array<int, 6>>& markov_offsets() const { return offsets_; }
  const std::array<double, 4>& perturbations() const { return perturbations_; }

 private:
  MapFamilyKind kind_ = MapFamilyKind::single;
  std::vector<std::array<int, 6>> offsets_;
  std::array<double, 4> perturbations_{};
};

/// The first `count` binary digits of 1/sqrt(3), computed with exact integer
/// arithmetic (digit k is 1 iff 3 u^2 < 4^k for the candidate numerator u).
std::vector<int> inv_sqrt3_bits(int count);

/// Finite window of a driving symbol sequence omega_k, k in [k_min, k_max].
class SymbolTrack {
 public:
  SymbolTrack(int k_min, std::vector<int> symbols) : k_min_(k_min), symbols_(std::move(symbols)) {}

  int k_min() const { return k_min_; }
  int k_max() const { return k_min_ + static_cast<int>(symbols_.size()) - 1; }
  bool covers(int k) const { return k >= k_min() && k <= k_max(); }
  /// omega_k; throws DomainError outside the window.
  int operator[](int k) const;

  /// True when every consecutive pair is admissible for `adjacency`.
  bool admissible(const std::vector<std::vector<int>>& adjacency) const;

 private:
  int k_min_;
  std::vector<int> symbols_;
};

/// omega_{i-25} = 1 + 2 tau_i + tau_{i+1}, tau the binary expansion of
/// 1/sqrt(3) with tau_i = 0 for i <= 0.
SymbolTrack driving_symbols(int k_min, int k_max);

/// The periodic sequence ... 1 2 3 1 2 3 ... with omega_0 = 1.
SymbolTrack periodic_symbols(int k_min, int k_max, int period);

/// The aperiodic4 subshift adjacency (rows 1100/0011/1100/0011).
std::vector<std::vector<int>> aperiodic4_adjacency();

}  // namespace cohset
