#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jrc/linalg.hpp"
#include "jrc/topology.hpp"

namespace jrc {

/// Binary K x L association: S(k, l) == 1 when AP l serves UE k.
class AssociationMatrix {
 public:
  AssociationMatrix() = default;
  AssociationMatrix(std::size_t num_ues, std::size_t num_aps);

  static AssociationMatrix all_ones(std::size_t num_ues, std::size_t num_aps);

  std::size_t num_ues() const noexcept { return num_ues_; }
  std::size_t num_aps() const noexcept { return num_aps_; }

  bool operator()(std::size_t k, std::size_t l) const { return bits_[k * num_aps_ + l] != 0; }
  void set(std::size_t k, std::size_t l, bool on) { bits_[k * num_aps_ + l] = on ? 1 : 0; }

  /// M_k, ascending.
  std::vector<std::size_t> serving_aps(std::size_t k) const;
  /// D_l, ascending.
  std::vector<std::size_t> served_ues(std::size_t l) const;
  std::size_t cluster_size(std::size_t k) const;
  std::size_t load(std::size_t l) const;

  /// Row-major 0/1 entries.
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  bool operator==(const AssociationMatrix&) const = default;
  /// Row-major lexicographic order with 0 < 1.
  bool lex_less(const AssociationMatrix& other) const { return bits_ < other.bits_; }

 private:
  std::size_t num_ues_ = 0;
  std::size_t num_aps_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Checks |D_l| <= tau_p and |M_k| >= 2; returns a description of every violation.
std::vector<std::string> constraint_violations(const AssociationMatrix& s, std::size_t tau_p);

/// LSFC-driven initial phase (UE preference, AP preference, repeated-UE repair).
/// Output satisfies |D_l| <= tau_p and |M_k| >= 2; throws InfeasibleError when
/// L < 2 or 2K > L tau_p.
AssociationMatrix initial_association(const RMat& beta, std::size_t tau_p);

struct ThresholdSelection {
  std::vector<std::size_t> aps;
  bool empty = false;  // set when no AP clears the threshold
};

/// {l : beta_kl >= xi}.
ThresholdSelection threshold_select(std::span<const double> beta_row, double xi);

/// Sum-SE of an association; must be deterministic in S.
using SumSeEvaluator = std::function<double(const AssociationMatrix&)>;

struct ExhaustiveLimits {
  std::uint64_t max_candidates = 1'000'000;
};

struct ExhaustiveResult {
  AssociationMatrix best;
  double best_sum_se = -std::numeric_limits<double>::infinity();
  std::uint64_t candidates = 0;  // size of the enumerated space
  std::uint64_t feasible = 0;    // candidates meeting both constraints
};

/// Number of matrices with every column of weight <= tau_p: (sum_{j<=tau_p} C(K, j))^L,
/// saturating at uint64 max.
std::uint64_t exhaustive_space_size(std::size_t num_ues, std::size_t num_aps, std::size_t tau_p);

/// Brute-force optimum of the sum-SE association problem. Ties go to the
/// lexicographically smallest S.
ExhaustiveResult exhaustive_p1(const RMat& beta, std::size_t tau_p, const SumSeEvaluator& se,
                               const ExhaustiveLimits& limits = {});

/// Per-(k, l) AOA estimates; nullopt where no echo report exists.
class AoaReports {
 public:
  AoaReports(std::size_t num_ues, std::size_t num_aps) : num_aps_(num_aps), angles_(num_ues * num_aps) {}
  void set(std::size_t k, std::size_t l, double angle) { angles_[k * num_aps_ + l] = angle; }
  const std::optional<double>& get(std::size_t k, std::size_t l) const { return angles_[k * num_aps_ + l]; }

 private:
  std::size_t num_aps_;
  std::vector<std::optional<double>> angles_;
};

/// Distance from `target` to the bearing ray leaving `origin` at `angle`.
/// Points behind the origin measure their distance to the origin itself.
double bearing_miss_distance(const Point2& origin, double angle, const Point2& target);

/// SCNR of the (k, l) sensing link used to rank APs during refinement.
using LinkScnr = std::function<double(std::size_t k, std::size_t l)>;

struct RefineOptions {
  std::size_t tau_p = 10;
  double tolerance_m = 7.5;  // one range-resolution cell at 20 MHz
};

struct RefineResult {
  AssociationMatrix s;
  std::vector<std::pair<std::size_t, std::size_t>> removed;  // (k, l)
  std::vector<std::pair<std::size_t, std::size_t>> added;
};

/// Sensing-aware second phase. Drops serving APs whose AOA bearing misses the
/// coarse UE position by more than the tolerance (lowest SCNR first), then
/// refills clusters below two APs with clutter-free APs that have spare
/// capacity (highest SCNR first). Throws UnsatisfiableLosError listing every
/// UE that cannot keep two clutter-free APs.
RefineResult refine_association(const AssociationMatrix& s, const AoaReports& reports,
                                std::span<const Point2> coarse_positions, const NetworkLayout& layout,
                                const LinkScnr& scnr, const RefineOptions& options);

/// Min over UEs of the worst serving-link SCNR.
double min_cluster_scnr(const AssociationMatrix& s, const LinkScnr& scnr);

/// Nearest-AP baseline: every UE served by its strongest-LSFC AP only.
AssociationMatrix nearest_ap_association(const RMat& beta);

void write_association_pairs_csv(std::ostream& out, const AssociationMatrix& s);
void write_association_grid_csv(std::ostream& out, const AssociationMatrix& s);
void write_association_diff_csv(std::ostream& out, const AssociationMatrix& before, const AssociationMatrix& after);

}  // namespace jrc
