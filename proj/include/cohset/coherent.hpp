#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

#include "cohset/grid.hpp"
#include "cohset/transfer.hpp"

namespace cohset {

/// plus selects {w > c}, minus selects {w < c}.
enum class Direction { plus, minus };

std::string_view to_string(Direction d);
inline double sign_of(Direction d) { return d == Direction::plus ? 1.0 : -1.0; }

BoxSet threshold_set(const Grid& grid, const Eigen::VectorXd& w, double c, Direction dir);

/// A threshold choice. Every c in [lower, upper) (plus) or (lower, upper]
/// (minus) selects the same `count` boxes; `c` is the candidate entry itself.
struct ThresholdChoice {
  double c = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double midpoint() const { return 0.5 * (lower + upper); }
};

/// Candidate thresholds at the distinct entries of w, ordered by decreasing
/// set size, keeping sets with 0 < count <= max_count.
std::vector<ThresholdChoice> threshold_candidates(const Eigen::VectorXd& w, Direction dir, std::size_t max_count);

/// Threshold on w_dst whose set measure is closest to `target`; ties go to
/// the smaller set.
ThresholdChoice eta_match(const Eigen::VectorXd& w_dst, double target, Direction dir);

struct ScanEntry {
  double c = 0.0;
  double measure = 0.0;
  double eta = 0.0;
  double measure_dst = 0.0;
  double rho = 0.0;
};

struct PairResult {
  Direction direction = Direction::plus;
  double c_star = 0.0;    // midpoint of the maximising threshold interval
  double eta_star = 0.0;  // midpoint of the matched threshold interval
  BoxSet src;
  BoxSet dst;
  double rho = 0.0;
  std::vector<ScanEntry> scan;
};

/// Scan c over the entries of w_src with mu({.}) <= 1/2, match the measure on
/// w_dst and keep the pair maximising rho_hat(P, A_src, A_dst).
PairResult optimal_pair(const Grid& grid, const Eigen::VectorXd& w_src, const Eigen::VectorXd& w_dst,
                        const SparseMatrix& P, Direction dir);

struct SequenceMember {
  double c = 0.0;
  BoxSet raw;  // threshold set
  BoxSet set;  // after connectify (1D); equal to raw on 2D grids
  std::size_t components = 1;
  double rho = 0.0;      // rho_hat(P_k, set_k, set_{k+1}), repaired sets
  double rho_raw = 0.0;  // same on the raw threshold sets
};

struct LevelPoint {
  double level = 0.0;
  double mean_rho = 0.0;
};

struct SequenceResult {
  Direction direction = Direction::plus;
  double level = 0.0;  // l*
  double mean_rho = 0.0;
  double mean_rho_repaired = 0.0;
  std::vector<SequenceMember> members;  // K+1 entries; the last has rho = 0
  std::vector<LevelPoint> curve;        // mean rho vs level for `direction`
  std::vector<LevelPoint> curve_other;  // the opposite direction
};

/// Scan the common measure level l = j/n over (0, 1/2] for both directions,
/// threshold every w_k at l and maximise the mean of rho_hat(P_k, A_k, A_{k+1}).
SequenceResult optimal_sequence(const Grid& grid, std::span<const Eigen::VectorXd> ws,
                                std::span<const SparseMatrix* const> Ps);

/// Replace a disconnected circle set by the arc of equal size closest to it
/// in symmetric difference. Ties prefer an arc starting where a component
/// starts (lowest component first), then the smallest start box.
BoxSet connectify(const BoxSet& set);

}  // namespace cohset
