#include "cohset/maps.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>

#include "cohset/errors.hpp"

namespace cohset {

namespace {

double wrap_unit(double y) {
  y -= std::floor(y);
  return y >= 1.0 ? 0.0 : y;
}

}  // namespace

double eval_H(double a, double x) {
  double y;
  if (x < 1.0 / 6.0 + 0.5 * a) {
    y = 3.0 * x;
  } else if (x < 1.0 / 3.0 + 2.0 / 3.0 * a) {
    y = -3.0 * x + 3.0 * a + 1.0;
  } else if (x < 2.0 / 3.0 + 2.0 / 3.0 * a) {
    y = 3.0 * x - a - 1.0;
  } else if (x < 5.0 / 6.0 + 0.5 * a) {
    y = -3.0 * x + 3.0 * a + 3.0;
  } else {
    y = 3.0 * x - 2.0;
  }
  return wrap_unit(y);
}

double rotate(double x, double shift) { return wrap_unit(x + shift); }

double eval_markov(const std::array<int, 6>& offsets, double x) {
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(std::floor(6.0 * x)), 5);
  const double y = 3.0 * x - static_cast<double>(i) / 2.0 + static_cast<double>(offsets[i]) / 6.0;
  return wrap_unit(y);
}

std::string_view to_string(MapFamilyKind kind) {
  switch (kind) {
    case MapFamilyKind::single: return "single";
    case MapFamilyKind::periodic3: return "periodic3";
    case MapFamilyKind::aperiodic4: return "aperiodic4";
  }
  return "?";
}

MapFamilyKind map_family_from_string(std::string_view name) {
  if (name == "single") return MapFamilyKind::single;
  if (name == "periodic3") return MapFamilyKind::periodic3;
  if (name == "aperiodic4") return MapFamilyKind::aperiodic4;
  throw ConfigError("unknown map family '" + std::string(name) + "'");
}

MapFamily MapFamily::single(std::array<int, 6> offsets) {
  MapFamily f;
  f.kind_ = MapFamilyKind::single;
  f.offsets_ = {offsets};
  return f;
}

MapFamily MapFamily::periodic3() {
  MapFamily f;
  f.kind_ = MapFamilyKind::periodic3;
  f.offsets_ = {{3, 2, 2, 0, 5, 5}, {2, 1, 4, 5, 4, 1}, {1, 3, 3, 4, 0, 0}};
  return f;
}

MapFamily MapFamily::aperiodic4() {
  using std::numbers::e;
  using std::numbers::pi;
  return aperiodic4({pi / 40.0, 2.0 * std::numbers::sqrt2 / 40.0, std::numbers::sqrt3 / 40.0, e / 40.0});
}

MapFamily MapFamily::aperiodic4(std::array<double, 4> perturbations) {
  MapFamily f;
  f.kind_ = MapFamilyKind::aperiodic4;
  f.perturbations_ = perturbations;
  return f;
}

int MapFamily::symbol_count() const {
  return kind_ == MapFamilyKind::aperiodic4 ? 4 : static_cast<int>(offsets_.size());
}

double MapFamily::operator()(int symbol, double x) const {
  if (symbol < 1 || symbol > symbol_count()) {
    throw ConfigError("map family " + std::string(to_string(kind_)) + ": unknown symbol " +
                      std::to_string(symbol));
  }
  if (kind_ != MapFamilyKind::aperiodic4) return eval_markov(offsets_[static_cast<std::size_t>(symbol - 1)], x);

  const double a = perturbations_[static_cast<std::size_t>(symbol - 1)];
  constexpr double quarter = 0.25;
  switch (symbol) {
    case 1: return eval_H(a, x);
    case 2: return rotate(eval_H(a, x), quarter);
    case 3: return eval_H(a, rotate(x, -quarter));
    default: return rotate(eval_H(a, rotate(x, -quarter)), quarter);
  }
}

std::vector<std::vector<int>> MapFamily::adjacency() const {
  switch (kind_) {
    case MapFamilyKind::single: return {{1}};
    case MapFamilyKind::periodic3: return {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
    case MapFamilyKind::aperiodic4: return aperiodic4_adjacency();
  }
  return {};
}

std::vector<std::vector<int>> aperiodic4_adjacency() {
  return {{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}};
}

std::vector<int> inv_sqrt3_bits(int count) {
  using boost::multiprecision::cpp_int;
  std::vector<int> bits;
  bits.reserve(static_cast<std::size_t>(std::max(count, 0)));
  cpp_int u = 0;
  cpp_int four_k = 1;
  for (int k = 1; k <= count; ++k) {
    four_k *= 4;
    const cpp_int candidate = 2 * u + 1;
    if (3 * candidate * candidate < four_k) {
      u = candidate;
      bits.push_back(1);
    } else {
      u = 2 * u;
      bits.push_back(0);
    }
  }
  return bits;
}

int SymbolTrack::operator[](int k) const {
  if (!covers(k)) {
    throw DomainError("symbol index " + std::to_string(k) + " outside driving window [" +
                      std::to_string(k_min()) + ", " + std::to_string(k_max()) + "]");
  }
  return symbols_[static_cast<std::size_t>(k - k_min_)];
}

bool SymbolTrack::admissible(const std::vector<std::vector<int>>& adjacency) const {
  for (std::size_t i = 0; i + 1 < symbols_.size(); ++i) {
    const auto a = static_cast<std::size_t>(symbols_[i] - 1);
    const auto b = static_cast<std::size_t>(symbols_[i + 1] - 1);
    if (a >= adjacency.size() || b >= adjacency[a].size() || adjacency[a][b] != 1) return false;
  }
  return true;
}

SymbolTrack driving_symbols(int k_min, int k_max) {
  if (k_max < k_min) throw ConfigError("driving_symbols: empty window");
  constexpr int offset = 25;
  const int needed = std::max(0, k_max + offset + 1);
  const std::vector<int> bits = inv_sqrt3_bits(needed);
  auto tau = [&](int i) { return i <= 0 ? 0 : bits[static_cast<std::size_t>(i - 1)]; };
  std::vector<int> symbols;
  symbols.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) {
    const int i = k + offset;
    symbols.push_back(1 + 2 * tau(i) + tau(i + 1));
  }
  return SymbolTrack(k_min, std::move(symbols));
}

SymbolTrack periodic_symbols(int k_min, int k_max, int period) {
  if (k_max < k_min) throw ConfigError("periodic_symbols: empty window");
  if (period < 1) throw ConfigError("periodic_symbols: period must be positive");
  std::vector<int> symbols;
  for (int k = k_min; k <= k_max; ++k) symbols.push_back(((k % period) + period) % period + 1);
  return SymbolTrack(k_min, std::move(symbols));
}

}  // namespace cohset
