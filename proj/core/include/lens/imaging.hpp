#pragma once

// Image multiplets of a catalog model: all complex solutions of eta(x) = y,
// their signed magnifications, and Monte-Carlo certification of the
// magnification sum.

#include <cstdint>
#include <string>
#include <vector>

#include "lens/catalog.hpp"
#include "lens/polycore.hpp"

namespace lens {

struct Solution {
  CPair position{};
  double residual = 0.0;  ///< max(|eta1 - y1|, |eta2 - y2|)
  bool is_real = false;
  cplx det_jacobian{};
  cplx magnification{};  ///< 1 / det_jacobian
};

enum class SolveStatus {
  complete,
  incomplete,  ///< fewer than bezout distinct solutions were separated
  caustic,     ///< some |det J| < caustic threshold; magnifications unreliable
};

std::string_view to_string(SolveStatus s) noexcept;

struct SolveOptions {
  double residual_tol = 1e-10;
  double reality_tol = 1e-8;
  double dedupe_tol = 1e-8;
  double caustic_det = 1e-6;
  NewtonOptions newton{};
};

struct SolutionSet {
  ModelId model_id = ModelId::fold;
  ControlParams params;
  Vec2 source{};
  int bezout = 0;
  /// Ordered by (Re z1, Im z1, Re z2, Im z2).
  std::vector<Solution> solutions;
  bool complete = false;
  double min_abs_det = 0.0;
  SolveStatus status = SolveStatus::incomplete;
  /// True when the closed-form elimination had to be supplemented by the
  /// resultant-pairing search.
  bool used_fallback = false;
};

SolutionSet solve_images(const CatastropheModel& model, const SolveOptions& opts = {});

struct InvariantReport {
  cplx sum_all{};
  double sum_real = 0.0;
  int n_real = 0;
  double residual_scale = 0.0;  ///< sum |mu|
  double normalized_defect = 0.0;
  double caustic_proximity = 0.0;  ///< min |det J|
};

/// Throws Error(incomplete) unless ss.complete.
InvariantReport invariant_report(const SolutionSet& ss);

/// |sum_real| on the same scale as normalized_defect.
double normalized_real_defect(const InvariantReport& r) noexcept;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Uniform sampling region for (y1, y2) and the model's c or p.
struct SamplingBox {
  Interval y1;
  Interval y2;
  Interval shape;  ///< ignored for fold and cusp
};

SamplingBox default_box(ModelId id) noexcept;

/// Name of the per-trial generator recorded in every report.
inline constexpr std::string_view kGeneratorName = "mt19937_64/splitmix64";

/// Deterministic draw of trial `index`: each trial owns a generator seeded
/// from (seed, index), so draws do not depend on evaluation order.
CatastropheModel draw_model(ModelId id, const SamplingBox& box, std::uint64_t seed,
                            std::uint64_t index);

struct BatchReport {
  ModelId model = ModelId::fold;
  std::uint64_t seed = 0;
  SamplingBox box;
  double tol = 0.0;
  int trials = 0;
  int accepted = 0;
  int rejected_near_caustic = 0;
  int rejected_unsolved = 0;
  double max_normalized_defect = 0.0;
  int all_real_trials = 0;
  int all_real_vanished = 0;
  double max_real_defect = 0.0;

  bool passed() const noexcept {
    return max_normalized_defect <= tol && all_real_vanished == all_real_trials;
  }
};

inline constexpr double kNearCausticDet = 1e-4;

BatchReport verify_invariant(ModelId id, int trials, std::uint64_t seed, const SamplingBox& box,
                             double tol);

}  // namespace lens
