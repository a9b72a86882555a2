#include "jrc/association.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>

#include "jrc/csv.hpp"
#include "jrc/errors.hpp"

namespace jrc {

AssociationMatrix::AssociationMatrix(std::size_t num_ues, std::size_t num_aps)
    : num_ues_(num_ues), num_aps_(num_aps), bits_(num_ues * num_aps, 0) {}

AssociationMatrix AssociationMatrix::all_ones(std::size_t num_ues, std::size_t num_aps) {
  AssociationMatrix s(num_ues, num_aps);
  std::fill(s.bits_.begin(), s.bits_.end(), std::uint8_t{1});
  return s;
}

std::vector<std::size_t> AssociationMatrix::serving_aps(std::size_t k) const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < num_aps_; ++l) {
    if ((*this)(k, l)) out.push_back(l);
  }
  return out;
}

std::vector<std::size_t> AssociationMatrix::served_ues(std::size_t l) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < num_ues_; ++k) {
    if ((*this)(k, l)) out.push_back(k);
  }
  return out;
}

std::size_t AssociationMatrix::cluster_size(std::size_t k) const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < num_aps_; ++l) n += (*this)(k, l);
  return n;
}

std::size_t AssociationMatrix::load(std::size_t l) const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < num_ues_; ++k) n += (*this)(k, l);
  return n;
}

std::vector<std::string> constraint_violations(const AssociationMatrix& s, std::size_t tau_p) {
  std::vector<std::string> out;
  for (std::size_t l = 0; l < s.num_aps(); ++l) {
    if (s.load(l) > tau_p) {
      out.push_back("AP " + std::to_string(l) + " serves " + std::to_string(s.load(l)) + " > tau_p UEs");
    }
  }
  for (std::size_t k = 0; k < s.num_ues(); ++k) {
    if (s.cluster_size(k) < 2) {
      out.push_back("UE " + std::to_string(k) + " has " + std::to_string(s.cluster_size(k)) + " < 2 APs");
    }
  }
  return out;
}

namespace {

void check_feasible(std::size_t num_ues, std::size_t num_aps, std::size_t tau_p) {
  if (tau_p < 1) throw InfeasibleError("association: tau_p must be >= 1");
  if (num_aps < 2) {
    throw InfeasibleError("association: constraint |M_k| >= 2 is unsatisfiable with L = " + std::to_string(num_aps) +
                          " AP(s)");
  }
  if (2 * num_ues > num_aps * tau_p) {
    throw InfeasibleError("association: capacity constraint |D_l| <= tau_p binds: 2K = " +
                          std::to_string(2 * num_ues) + " exceeds L*tau_p = " + std::to_string(num_aps * tau_p));
  }
}

// Descending beta, ties to the lower index.
std::vector<std::size_t> order_desc(const std::vector<double>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return idx;
}

class Repair {
 public:
  Repair(AssociationMatrix& s, const RMat& beta, std::size_t tau_p)
      : s_(s), beta_(beta), tau_p_(tau_p), load_(s.num_aps()), size_(s.num_ues()) {
    for (std::size_t l = 0; l < s.num_aps(); ++l) load_[l] = s.load(l);
    for (std::size_t k = 0; k < s.num_ues(); ++k) size_[k] = s.cluster_size(k);
  }

  void add(std::size_t k, std::size_t l) {
    s_.set(k, l, true);
    ++load_[l];
    ++size_[k];
  }
  void drop(std::size_t k, std::size_t l) {
    s_.set(k, l, false);
    --load_[l];
    --size_[k];
  }

  std::size_t cluster_size(std::size_t k) const { return size_[k]; }

  // Next-best AP with spare capacity.
  bool add_spare(std::size_t k) {
    std::size_t best = s_.num_aps();
    for (std::size_t l = 0; l < s_.num_aps(); ++l) {
      if (s_(k, l) || load_[l] >= tau_p_) continue;
      if (best == s_.num_aps() || beta_(k, l) > beta_(k, best)) best = l;
    }
    if (best == s_.num_aps()) return false;
    add(k, best);
    return true;
  }

  // Take a slot from a UE that is served more than twice (a repeated UE).
  bool evict_repeated(std::size_t k) {
    std::vector<double> row(s_.num_aps());
    for (std::size_t l = 0; l < s_.num_aps(); ++l) row[l] = beta_(k, l);
    for (auto l : order_desc(row)) {
      if (s_(k, l)) continue;
      std::size_t victim = s_.num_ues();
      for (std::size_t i = 0; i < s_.num_ues(); ++i) {
        if (i == k || !s_(i, l) || size_[i] <= 2) continue;
        if (victim == s_.num_ues() || beta_(i, l) < beta_(victim, l)) victim = i;
      }
      if (victim == s_.num_ues()) continue;
      drop(victim, l);
      add(k, l);
      return true;
    }
    return false;
  }

  // Alternating path: k joins a full AP l0, a UE of l0 moves to l1, ... ending at an
  // AP with spare capacity or at a repeated UE that can give up its slot.
  bool augment(std::size_t k) {
    const std::size_t num_aps = s_.num_aps();
    struct Step {
      std::size_t ue;
      std::size_t from;
    };
    std::vector<std::optional<Step>> parent(num_aps);
    std::vector<bool> seen(num_aps, false);
    std::deque<std::size_t> queue;
    for (std::size_t l = 0; l < num_aps; ++l) {
      if (!s_(k, l)) {
        seen[l] = true;
        queue.push_back(l);
      }
    }
    while (!queue.empty()) {
      const auto l = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < s_.num_ues(); ++i) {
        if (i == k || !s_(i, l)) continue;
        if (size_[i] > 2) {
          apply_path(k, l, parent, i);
          return true;
        }
        for (std::size_t l2 = 0; l2 < num_aps; ++l2) {
          if (seen[l2] || s_(i, l2)) continue;
          seen[l2] = true;
          parent[l2] = Step{i, l};
          if (load_[l2] < tau_p_) {
            apply_path(k, l2, parent, s_.num_ues());
            return true;
          }
          queue.push_back(l2);
        }
      }
    }
    return false;
  }

 private:
  template <class Parents>
  void apply_path(std::size_t k, std::size_t terminal, const Parents& parent, std::size_t evict) {
    if (evict != s_.num_ues()) drop(evict, terminal);
    std::size_t l = terminal;
    while (parent[l]) {
      const auto step = *parent[l];
      add(step.ue, l);
      drop(step.ue, step.from);
      l = step.from;
    }
    add(k, l);
  }

  AssociationMatrix& s_;
  const RMat& beta_;
  std::size_t tau_p_;
  std::vector<std::size_t> load_;
  std::vector<std::size_t> size_;
};

}  // namespace

AssociationMatrix initial_association(const RMat& beta, std::size_t tau_p) {
  const auto num_ues = static_cast<std::size_t>(beta.rows());
  const auto num_aps = static_cast<std::size_t>(beta.cols());
  check_feasible(num_ues, num_aps, tau_p);
  AssociationMatrix s(num_ues, num_aps);

  // UE preference: strongest AP, admitted strongest-first up to capacity.
  std::vector<std::vector<std::size_t>> claimants(num_aps);
  for (std::size_t k = 0; k < num_ues; ++k) {
    std::size_t best = 0;
    for (std::size_t l = 1; l < num_aps; ++l) {
      if (beta(k, l) > beta(k, best)) best = l;
    }
    claimants[best].push_back(k);
  }
  for (std::size_t l = 0; l < num_aps; ++l) {
    auto& c = claimants[l];
    std::stable_sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) { return beta(a, l) > beta(b, l); });
    for (std::size_t i = 0; i < c.size() && i < tau_p; ++i) s.set(c[i], l, true);
  }

  // AP preference: each AP fills its remaining tau_p - |D_l| slots by LSFC.
  for (std::size_t l = 0; l < num_aps; ++l) {
    std::vector<double> col(num_ues);
    for (std::size_t k = 0; k < num_ues; ++k) col[k] = beta(k, l);
    std::size_t free = tau_p - std::min(tau_p, s.load(l));
    for (auto k : order_desc(col)) {
      if (free == 0) break;
      if (s(k, l)) continue;
      s.set(k, l, true);
      --free;
    }
  }

  // Repeated-UE handling: UEs below two APs, strongest unserved LSFC first.
  Repair repair(s, beta, tau_p);
  std::vector<std::size_t> deficient;
  std::vector<double> key(num_ues, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < num_ues; ++k) {
    if (repair.cluster_size(k) >= 2) continue;
    deficient.push_back(k);
    for (std::size_t l = 0; l < num_aps; ++l) {
      if (!s(k, l)) key[k] = std::max(key[k], beta(k, l));
    }
  }
  std::stable_sort(deficient.begin(), deficient.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  for (auto k : deficient) {
    while (repair.cluster_size(k) < 2) {
      if (repair.add_spare(k) || repair.evict_repeated(k) || repair.augment(k)) continue;
      throw InfeasibleError("association: no assignment gives UE " + std::to_string(k) + " two APs");
    }
  }
  return s;
}

ThresholdSelection threshold_select(std::span<const double> beta_row, double xi) {
  ThresholdSelection sel;
  for (std::size_t l = 0; l < beta_row.size(); ++l) {
    if (beta_row[l] >= xi) sel.aps.push_back(l);
  }
  sel.empty = sel.aps.empty();
  return sel;
}

std::uint64_t exhaustive_space_size(std::size_t num_ues, std::size_t num_aps, std::size_t tau_p) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t per_ap = 0;
  std::uint64_t binom = 1;
  for (std::size_t j = 0; j <= std::min(tau_p, num_ues); ++j) {
    if (j > 0) binom = binom * (num_ues - j + 1) / j;
    per_ap += binom;
  }
  std::uint64_t total = 1;
  for (std::size_t l = 0; l < num_aps; ++l) {
    if (total > kMax / per_ap) return kMax;
    total *= per_ap;
  }
  return total;
}

ExhaustiveResult exhaustive_p1(const RMat& beta, std::size_t tau_p, const SumSeEvaluator& se,
                               const ExhaustiveLimits& limits) {
  const auto num_ues = static_cast<std::size_t>(beta.rows());
  const auto num_aps = static_cast<std::size_t>(beta.cols());
  check_feasible(num_ues, num_aps, tau_p);
  if (num_ues > 63) throw TooLargeError("exhaustive_p1: K > 63 is out of range; use initial_association");
  const auto space = exhaustive_space_size(num_ues, num_aps, tau_p);
  if (space > limits.max_candidates) {
    throw TooLargeError("exhaustive_p1: " + std::to_string(space) + " candidate associations exceed the cap of " +
                        std::to_string(limits.max_candidates) + "; use initial_association instead");
  }

  // Every column pattern with at most tau_p UEs.
  std::vector<std::uint64_t> columns;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << num_ues); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) <= tau_p) columns.push_back(mask);
  }

  ExhaustiveResult result;
  result.candidates = space;
  std::vector<std::size_t> digit(num_aps, 0);
  AssociationMatrix s(num_ues, num_aps);
  while (true) {
    bool ok = true;
    for (std::size_t k = 0; k < num_ues && ok; ++k) {
      std::size_t count = 0;
      for (std::size_t l = 0; l < num_aps; ++l) count += (columns[digit[l]] >> k) & 1U;
      ok = count >= 2;
    }
    if (ok) {
      for (std::size_t k = 0; k < num_ues; ++k) {
        for (std::size_t l = 0; l < num_aps; ++l) s.set(k, l, ((columns[digit[l]] >> k) & 1U) != 0);
      }
      ++result.feasible;
      const double value = se(s);
      const bool first = result.feasible == 1;
      const double tol = first ? 0.0 : 1e-12 * std::max(1.0, std::abs(result.best_sum_se));
      const bool better = value > result.best_sum_se + tol;
      const bool tie = !first && !better && std::abs(value - result.best_sum_se) <= tol;
      if (first || better || (tie && s.lex_less(result.best))) {
        result.best = s;
        result.best_sum_se = value;
      }
    }
    std::size_t pos = 0;
    while (pos < num_aps && ++digit[pos] == columns.size()) digit[pos++] = 0;
    if (pos == num_aps) break;
  }
  if (result.feasible == 0) throw InfeasibleError("exhaustive_p1: no feasible association");
  return result;
}

double bearing_miss_distance(const Point2& origin, double angle, const Point2& target) {
  const Point2 dir(std::cos(angle), std::sin(angle));
  const Point2 rel = target - origin;
  const double along = rel.dot(dir);
  if (along <= 0.0) return rel.norm();
  return std::abs(dir.x() * rel.y() - dir.y() * rel.x());
}

RefineResult refine_association(const AssociationMatrix& s, const AoaReports& reports,
                                std::span<const Point2> coarse_positions, const NetworkLayout& layout,
                                const LinkScnr& scnr, const RefineOptions& options) {
  const auto num_ues = s.num_ues();
  const auto num_aps = s.num_aps();
  if (coarse_positions.size() != num_ues) throw DomainError("refine_association: one coarse position per UE");
  if (layout.num_aps() != num_aps) throw DomainError("refine_association: layout/association AP count mismatch");

  RefineResult out;
  out.s = s;
  const auto converges = [&](std::size_t k, std::size_t l) -> std::optional<bool> {
    const auto& angle = reports.get(k, l);
    if (!angle) return std::nullopt;
    return bearing_miss_distance(layout.aps[l], *angle, coarse_positions[k]) <= options.tolerance_m;
  };

  // Drop APs whose bearings do not meet at the coarse position.
  for (std::size_t k = 0; k < num_ues; ++k) {
    std::vector<std::pair<double, std::size_t>> blocked;
    for (auto l : s.serving_aps(k)) {
      const auto ok = converges(k, l);
      if (ok && !*ok) blocked.emplace_back(scnr(k, l), l);
    }
    std::stable_sort(blocked.begin(), blocked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [value, l] : blocked) {
      out.s.set(k, l, false);
      out.removed.emplace_back(k, l);
    }
  }

  // Refill clusters below two with clutter-free APs that have room.
  std::vector<std::size_t> load(num_aps);
  for (std::size_t l = 0; l < num_aps; ++l) load[l] = out.s.load(l);
  std::vector<std::size_t> unsatisfied;
  for (std::size_t k = 0; k < num_ues; ++k) {
    std::size_t size = out.s.cluster_size(k);
    if (size >= 2) continue;
    struct Candidate {
      double scnr;
      double distance;
      std::size_t ap;
    };
    std::vector<Candidate> candidates;
    for (std::size_t l = 0; l < num_aps; ++l) {
      if (out.s(k, l) || load[l] >= options.tau_p) continue;
      const auto ok = converges(k, l);
      if (!ok || !*ok) continue;
      candidates.push_back({scnr(k, l), (layout.aps[l] - coarse_positions[k]).norm(), l});
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.scnr != b.scnr) return a.scnr > b.scnr;
      return a.distance < b.distance;
    });
    for (const auto& c : candidates) {
      if (size >= 2) break;
      out.s.set(k, c.ap, true);
      ++load[c.ap];
      ++size;
      out.added.emplace_back(k, c.ap);
    }
    if (size < 2) unsatisfied.push_back(k);
  }
  if (!unsatisfied.empty()) {
    throw UnsatisfiableLosError(unsatisfied, "refine_association: no clutter-free AP pair available");
  }
  return out;
}

double min_cluster_scnr(const AssociationMatrix& s, const LinkScnr& scnr) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.num_ues(); ++k) {
    for (auto l : s.serving_aps(k)) worst = std::min(worst, scnr(k, l));
  }
  return worst;
}

AssociationMatrix nearest_ap_association(const RMat& beta) {
  AssociationMatrix s(static_cast<std::size_t>(beta.rows()), static_cast<std::size_t>(beta.cols()));
  for (Eigen::Index k = 0; k < beta.rows(); ++k) {
    Eigen::Index best = 0;
    beta.row(k).maxCoeff(&best);
    s.set(static_cast<std::size_t>(k), static_cast<std::size_t>(best), true);
  }
  return s;
}

void write_association_pairs_csv(std::ostream& out, const AssociationMatrix& s) {
  csv::Writer w(out, {"ue_id", "ap_id"});
  for (std::size_t k = 0; k < s.num_ues(); ++k) {
    for (auto l : s.serving_aps(k)) w.row({static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(l)});
  }
}

void write_association_grid_csv(std::ostream& out, const AssociationMatrix& s) {
  std::vector<std::string> header{"ue_id"};
  for (std::size_t l = 0; l < s.num_aps(); ++l) header.push_back("ap_" + std::to_string(l));
  csv::Writer w(out, header);
  for (std::size_t k = 0; k < s.num_ues(); ++k) {
    std::vector<csv::Cell> row{static_cast<std::uint64_t>(k)};
    for (std::size_t l = 0; l < s.num_aps(); ++l) row.emplace_back(static_cast<std::uint64_t>(s(k, l)));
    w.row(row);
  }
}

void write_association_diff_csv(std::ostream& out, const AssociationMatrix& before, const AssociationMatrix& after) {
  if (before.num_ues() != after.num_ues() || before.num_aps() != after.num_aps()) {
    throw DomainError("association diff: shape mismatch");
  }
  csv::Writer w(out, {"ue_id", "ap_id", "change"});
  for (std::size_t k = 0; k < before.num_ues(); ++k) {
    for (std::size_t l = 0; l < before.num_aps(); ++l) {
      if (before(k, l) == after(k, l)) continue;
      w.row({static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(l),
             std::string(after(k, l) ? "added" : "removed")});
    }
  }
}

}  // namespace jrc
