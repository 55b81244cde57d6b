#include "lens/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lens/error.hpp"
#include "lens/parallel.hpp"

namespace lens {

namespace {

double pair_size(const CPair& z) { return std::max(std::abs(z[0]), std::abs(z[1])); }

bool same_point(const CPair& a, const CPair& b, double tol) {
  const double d = std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
  return d <= tol * (1.0 + std::max(pair_size(a), pair_size(b)));
}

bool lex_less(const CPair& a, const CPair& b) {
  if (a[0].real() != b[0].real()) return a[0].real() < b[0].real();
  if (a[0].imag() != b[0].imag()) return a[0].imag() < b[0].imag();
  if (a[1].real() != b[1].real()) return a[1].real() < b[1].real();
  return a[1].imag() < b[1].imag();
}

struct Polished {
  CPair x;
  double residual;
};

class Collector {
public:
  Collector(const std::array<BiPoly, 2>& sys, const SolveOptions& opts) : sys_(sys), opts_(opts) {}

  void add(const CPair& start) {
    const NewtonResult nr = newton_polish2(sys_[0], sys_[1], start, opts_.newton);
    if (!(nr.residual <= opts_.residual_tol)) return;
    for (Polished& s : found_) {
      if (same_point(s.x, nr.x, opts_.dedupe_tol)) {
        if (nr.residual < s.residual) s = {nr.x, nr.residual};
        return;
      }
    }
    found_.push_back({nr.x, nr.residual});
  }

  std::size_t size() const noexcept { return found_.size(); }
  const std::vector<Polished>& found() const noexcept { return found_; }

private:
  const std::array<BiPoly, 2>& sys_;
  const SolveOptions& opts_;
  std::vector<Polished> found_;
};

std::vector<cplx> cluster_values(const UniPoly& p) {
  std::vector<cplx> out;
  if (p.degree() < 1) return out;
  for (const RootCluster& r : aberth_roots(p)) out.push_back(r.value);
  return out;
}

void recipe_candidates(const CatastropheModel& model, Collector& col) {
  const EliminationRecipe r = eliminate(model);
  const double guard_scale = std::max(1.0, r.guard.max_abs_coeff());
  for (const RootCluster& cl : aberth_roots(r.eliminant)) {
    const bool guarded =
        std::abs(r.guard(cl.value)) <= 1e-6 * guard_scale * (1.0 + std::abs(cl.value));
    if (cl.multiplicity_estimate == 1 && !guarded) {
      col.add(r.back_substitution(cl.value));
    } else {
      for (const CPair& cand : r.alternate(cl.value)) col.add(cand);
    }
  }
}

void resultant_candidates(const std::array<BiPoly, 2>& sys, Collector& col) {
  std::vector<cplx> first, second;
  try {
    first = cluster_values(sylvester_resultant(sys[0], sys[1], Var::z2));
    second = cluster_values(sylvester_resultant(sys[0], sys[1], Var::z1));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::degenerate_system && e.code() != ErrorCode::non_convergence)
      throw;
    return;
  }
  for (const cplx& a : first)
    for (const cplx& b : second) col.add({a, b});
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform(std::mt19937_64& rng, const Interval& iv) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return iv.lo + u * (iv.hi - iv.lo);
}

}  // namespace

std::string_view to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::complete: return "complete";
    case SolveStatus::incomplete: return "incomplete";
    case SolveStatus::caustic: return "caustic";
  }
  return "unknown";
}

SolutionSet solve_images(const CatastropheModel& model, const SolveOptions& opts) {
  const auto sys = model.system();
  const int bezout = model.bezout();

  SolutionSet ss;
  ss.model_id = model.id();
  ss.params = model.params();
  ss.source = model.source();
  ss.bezout = bezout;

  Collector col(sys, opts);
  try {
    recipe_candidates(model, col);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::degenerate_parameters && e.code() != ErrorCode::non_convergence)
      throw;
  }
  if (static_cast<int>(col.size()) != bezout) {
    ss.used_fallback = true;
    resultant_candidates(sys, col);
  }

  for (const Polished& p : col.found()) {
    Solution s;
    s.position = p.x;
    s.residual = p.residual;
    const auto real_enough = [&](cplx z) {
      return std::abs(z.imag()) <= opts.reality_tol * (1.0 + std::abs(z.real()));
    };
    s.is_real = real_enough(p.x[0]) && real_enough(p.x[1]);
    if (s.is_real) {
      // Re-polish in real arithmetic so real images carry exactly real data.
      const CPair start{cplx{p.x[0].real()}, cplx{p.x[1].real()}};
      const NewtonResult nr = newton_polish2(sys[0], sys[1], start, opts.newton);
      if (nr.residual <= opts.residual_tol) {
        s.position = {cplx{nr.x[0].real()}, cplx{nr.x[1].real()}};
        const CPair e = model.eta_at(s.position);
        s.residual = std::max(std::abs(e[0] - ss.source[0]), std::abs(e[1] - ss.source[1]));
      } else {
        s.is_real = false;
      }
    }
    s.det_jacobian = jacobian(model, s.position).det;
    s.magnification = 1.0 / s.det_jacobian;
    ss.solutions.push_back(s);
  }

  std::sort(ss.solutions.begin(), ss.solutions.end(),
            [](const Solution& a, const Solution& b) { return lex_less(a.position, b.position); });

  ss.complete = static_cast<int>(ss.solutions.size()) == bezout;
  ss.min_abs_det = std::numeric_limits<double>::infinity();
  for (const Solution& s : ss.solutions) ss.min_abs_det = std::min(ss.min_abs_det, std::abs(s.det_jacobian));
  if (ss.solutions.empty()) ss.min_abs_det = 0.0;

  if (ss.min_abs_det < opts.caustic_det)
    ss.status = SolveStatus::caustic;
  else if (!ss.complete)
    ss.status = SolveStatus::incomplete;
  else
    ss.status = SolveStatus::complete;
  return ss;
}

InvariantReport invariant_report(const SolutionSet& ss) {
  if (!ss.complete)
    throw Error(ErrorCode::incomplete,
                "invariant_report: solution set has " + std::to_string(ss.solutions.size()) +
                    " of " + std::to_string(ss.bezout) + " solutions");
  InvariantReport r;
  for (const Solution& s : ss.solutions) {
    r.sum_all += s.magnification;
    r.residual_scale += std::abs(s.magnification);
    if (s.is_real) {
      r.sum_real += s.magnification.real();
      ++r.n_real;
    }
  }
  r.normalized_defect = std::abs(r.sum_all) / std::max(1.0, r.residual_scale);
  r.caustic_proximity = ss.min_abs_det;
  return r;
}

double normalized_real_defect(const InvariantReport& r) noexcept {
  return std::abs(r.sum_real) / std::max(1.0, r.residual_scale);
}

SamplingBox default_box(ModelId id) noexcept {
  switch (id) {
    case ModelId::fold:
    case ModelId::cusp: return {{-2.0, 2.0}, {-2.0, 2.0}, {0.0, 0.0}};
    case ModelId::swallowtail: return {{-2.0, 2.0}, {-2.0, 2.0}, {-3.0, 1.0}};
    case ModelId::elliptic_umbilic:
    case ModelId::hyperbolic_umbilic: return {{-3.0, 3.0}, {-3.0, 3.0}, {-3.0, 3.0}};
    case ModelId::elliptic_umbilic_lensing:
    case ModelId::hyperbolic_umbilic_lensing: return {{-3.0, 3.0}, {-3.0, 3.0}, {-2.0, 2.0}};
  }
  return {};
}

CatastropheModel draw_model(ModelId id, const SamplingBox& box, std::uint64_t seed,
                            std::uint64_t index) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(index)));
  const double shape = uniform(rng, box.shape);
  ControlParams params;
  params.y[0] = uniform(rng, box.y1);
  params.y[1] = uniform(rng, box.y2);
  if (uses_c(id)) params.c = shape;
  if (uses_p(id)) params.p = shape;
  return instantiate(id, params);
}

BatchReport verify_invariant(ModelId id, int trials, std::uint64_t seed, const SamplingBox& box,
                             double tol) {
  BatchReport rep;
  rep.model = id;
  rep.seed = seed;
  rep.box = box;
  rep.tol = tol;
  rep.trials = std::max(0, trials);

  struct Trial {
    enum class Kind { accepted, near_caustic, unsolved } kind = Kind::unsolved;
    double defect = 0.0;
    bool all_real = false;
    double real_defect = 0.0;
  };
  std::vector<Trial> results(static_cast<std::size_t>(rep.trials));

  parallel_for(results.size(), [&](std::size_t i) {
    const CatastropheModel model = draw_model(id, box, seed, i);
    const SolutionSet ss = solve_images(model);
    Trial& t = results[i];
    if (ss.complete && ss.min_abs_det < kNearCausticDet) {
      t.kind = Trial::Kind::near_caustic;
      return;
    }
    if (ss.status != SolveStatus::complete) {
      t.kind = ss.min_abs_det < kNearCausticDet ? Trial::Kind::near_caustic : Trial::Kind::unsolved;
      return;
    }
    const InvariantReport r = invariant_report(ss);
    t.kind = Trial::Kind::accepted;
    t.defect = r.normalized_defect;
    t.all_real = r.n_real == ss.bezout;
    t.real_defect = normalized_real_defect(r);
  });

  for (const Trial& t : results) {
    switch (t.kind) {
      case Trial::Kind::near_caustic: ++rep.rejected_near_caustic; continue;
      case Trial::Kind::unsolved: ++rep.rejected_unsolved; continue;
      case Trial::Kind::accepted: break;
    }
    ++rep.accepted;
    rep.max_normalized_defect = std::max(rep.max_normalized_defect, t.defect);
    if (t.all_real) {
      ++rep.all_real_trials;
      rep.max_real_defect = std::max(rep.max_real_defect, t.real_defect);
      if (t.real_defect <= tol) ++rep.all_real_vanished;
    }
  }
  return rep;
}

}  // namespace lens
