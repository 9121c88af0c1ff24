#include "cohset/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cohset/errors.hpp"

namespace cohset {

std::string_view to_string(Direction d) { return d == Direction::plus ? "plus" : "minus"; }

BoxSet threshold_set(const Grid& grid, const Eigen::VectorXd& w, double c, Direction dir) {
  if (static_cast<std::size_t>(w.size()) != grid.size()) throw DomainError("threshold_set: vector/grid size mismatch");
  std::vector<std::size_t> idx;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (dir == Direction::plus ? w(i) > c : w(i) < c) idx.push_back(static_cast<std::size_t>(i));
  }
  return BoxSet(grid, std::move(idx));
}

namespace {

// Distinct values of w ascending, with how many entries lie strictly above
// and strictly below each.
struct Levels {
  std::vector<double> v;
  std::vector<std::size_t> above;
  std::vector<std::size_t> below;
};

Levels levels_of(const Eigen::VectorXd& w) {
  std::vector<double> s(w.data(), w.data() + w.size());
  std::sort(s.begin(), s.end());
  Levels L;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && s[j] == s[i]) ++j;
    L.v.push_back(s[i]);
    L.below.push_back(i);
    L.above.push_back(n - j);
    i = j;
  }
  return L;
}

std::vector<ThresholdChoice> all_choices(const Eigen::VectorXd& w, Direction dir) {
  const Levels L = levels_of(w);
  const std::size_t m = L.v.size();
  std::vector<ThresholdChoice> out;
  if (dir == Direction::plus) {
    for (std::size_t i = 0; i < m; ++i) {
      const double up = i + 1 < m ? L.v[i + 1] : L.v[i];
      out.push_back({L.v[i], L.v[i], up, L.above[i]});
    }
  } else {
    for (std::size_t i = m; i-- > 0;) {
      const double lo = i > 0 ? L.v[i - 1] : L.v[i];
      out.push_back({L.v[i], lo, L.v[i], L.below[i]});
    }
  }
  return out;  // decreasing set size
}

BoxSet set_of(const Grid& grid, const Eigen::VectorXd& w, const ThresholdChoice& t, Direction dir) {
  return threshold_set(grid, w, t.c, dir);
}

}  // namespace

std::vector<ThresholdChoice> threshold_candidates(const Eigen::VectorXd& w, Direction dir, std::size_t max_count) {
  std::vector<ThresholdChoice> out;
  for (const auto& t : all_choices(w, dir)) {
    if (t.count > 0 && t.count <= max_count) out.push_back(t);
  }
  return out;
}

ThresholdChoice eta_match(const Eigen::VectorXd& w_dst, double target, Direction dir) {
  if (w_dst.size() == 0) throw DomainError("eta_match: empty vector");
  const double n = static_cast<double>(w_dst.size());
  const auto choices = all_choices(w_dst, dir);
  const ThresholdChoice* best = nullptr;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& t : choices) {
    const double gap = std::abs(static_cast<double>(t.count) / n - target);
    if (gap <= best_gap) {  // later choices are smaller sets
      best_gap = gap;
      best = &t;
    }
  }
  return *best;
}

PairResult optimal_pair(const Grid& grid, const Eigen::VectorXd& w_src, const Eigen::VectorXd& w_dst,
                        const SparseMatrix& P, Direction dir) {
  const std::size_t n = grid.size();
  if (static_cast<std::size_t>(w_src.size()) != n || static_cast<std::size_t>(w_dst.size()) != n) {
    throw DomainError("optimal_pair: vector/grid size mismatch");
  }
  const auto cands = threshold_candidates(w_src, dir, n / 2);
  if (cands.empty()) throw DomainError("optimal_pair: no threshold gives a set of measure in (0, 1/2]");

  PairResult r{dir, 0.0, 0.0, BoxSet(grid, {}), BoxSet(grid, {}), -1.0, {}};
  std::vector<ThresholdChoice> matched;
  for (const auto& t : cands) {
    const double mu = static_cast<double>(t.count) / static_cast<double>(n);
    const ThresholdChoice e = eta_match(w_dst, mu, dir);
    const double rho = rho_hat(P, set_of(grid, w_src, t, dir), set_of(grid, w_dst, e, dir));
    r.scan.push_back({t.c, mu, e.c, static_cast<double>(e.count) / static_cast<double>(n), rho});
    matched.push_back(e);
  }

  double best = -1.0;
  for (const auto& s : r.scan) best = std::max(best, s.rho);
  // first run of maximisers in scan order; c* is the midpoint of its union
  std::size_t first = 0;
  while (r.scan[first].rho != best) ++first;
  std::size_t last = first;
  while (last + 1 < r.scan.size() && r.scan[last + 1].rho == best) ++last;
  const double lo = std::min(cands[first].lower, cands[last].lower);
  const double hi = std::max(cands[first].upper, cands[last].upper);

  const std::size_t pick = first;
  r.c_star = 0.5 * (lo + hi);
  r.eta_star = matched[pick].midpoint();
  r.src = set_of(grid, w_src, cands[pick], dir);
  r.dst = set_of(grid, w_dst, matched[pick], dir);
  r.rho = best;
  return r;
}

SequenceResult optimal_sequence(const Grid& grid, std::span<const Eigen::VectorXd> ws,
                                std::span<const SparseMatrix* const> Ps) {
  if (ws.size() < 2 || Ps.size() + 1 != ws.size()) {
    throw ConfigError("optimal_sequence: need K+1 vectors and K matrices with K >= 1");
  }
  const std::size_t n = grid.size();
  const std::size_t K = Ps.size();

  auto mean_at = [&](Direction dir, double level, std::vector<ThresholdChoice>* out) {
    std::vector<ThresholdChoice> ch;
    std::vector<BoxSet> sets;
    for (const auto& w : ws) {
      ch.push_back(eta_match(w, level, dir));
      sets.push_back(set_of(grid, w, ch.back(), dir));
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (sets[k].empty()) return -1.0;
      sum += rho_hat(*Ps[k], sets[k], sets[k + 1]);
    }
    if (out) *out = ch;
    return sum / static_cast<double>(K);
  };

  SequenceResult best;
  best.mean_rho = -2.0;
  std::vector<LevelPoint> curves[2];
  for (Direction dir : {Direction::plus, Direction::minus}) {
    auto& curve = curves[dir == Direction::plus ? 0 : 1];
    for (std::size_t j = 1; j <= n / 2; ++j) {
      const double level = static_cast<double>(j) / static_cast<double>(n);
      const double m = mean_at(dir, level, nullptr);
      curve.push_back({level, m});
      if (m > best.mean_rho) {
        best.mean_rho = m;
        best.level = level;
        best.direction = dir;
      }
    }
  }
  best.curve = curves[best.direction == Direction::plus ? 0 : 1];
  best.curve_other = curves[best.direction == Direction::plus ? 1 : 0];

  std::vector<ThresholdChoice> ch;
  mean_at(best.direction, best.level, &ch);
  for (std::size_t k = 0; k <= K; ++k) {
    SequenceMember mem{ch[k].c, set_of(grid, ws[k], ch[k], best.direction), BoxSet(grid, {}), 1, 0.0, 0.0};
    mem.components = components(mem.raw).size();
    mem.set = (grid.dim() == 1 && !mem.raw.empty()) ? connectify(mem.raw) : mem.raw;
    best.members.push_back(std::move(mem));
  }
  double repaired = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    auto& m = best.members[k];
    m.rho_raw = rho_hat(*Ps[k], m.raw, best.members[k + 1].raw);
    m.rho = rho_hat(*Ps[k], m.set, best.members[k + 1].set);
    repaired += m.rho;
  }
  best.mean_rho_repaired = repaired / static_cast<double>(K);
  return best;
}

BoxSet connectify(const BoxSet& set) {
  const Grid& g = set.grid();
  if (set.empty()) throw DomainError("connectify: empty set");
  if (g.dim() != 1) throw ConfigError("connectify: only circle grids are repaired");
  const auto comps = components(set);
  if (comps.size() == 1) return set;

  const std::size_t n = g.size();
  const std::size_t m = set.size();
  const std::vector<char> in = set.mask();

  // overlap of the arc [s, s+m) with the set, by sliding window
  std::vector<std::size_t> overlap(n, 0);
  std::size_t cur = 0;
  for (std::size_t i = 0; i < m; ++i) cur += static_cast<std::size_t>(in[i % n]);
  for (std::size_t s = 0; s < n; ++s) {
    overlap[s] = cur;
    cur -= static_cast<std::size_t>(in[s]);
    cur += static_cast<std::size_t>(in[(s + m) % n]);
  }
  const std::size_t best = *std::max_element(overlap.begin(), overlap.end());

  // component starts: a member whose predecessor (cyclically) is not a member
  std::size_t start = n;
  for (const auto& c : comps) {
    for (auto b : c.indices()) {
      if (!in[(b + n - 1) % n] && overlap[b] == best) {
        start = b;
        break;
      }
    }
    if (start != n) break;
  }
  if (start == n) start = static_cast<std::size_t>(std::find(overlap.begin(), overlap.end(), best) - overlap.begin());

  std::vector<std::size_t> arc;
  for (std::size_t i = 0; i < m; ++i) arc.push_back((start + i) % n);
  return BoxSet(g, std::move(arc));
}

}  // namespace cohset
