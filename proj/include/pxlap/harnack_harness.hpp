#pragma once

// Measurements of the interior estimates on discrete data: Harnack, weak
// Harnack, Caccioppoli, local sup bounds and oscillation decay. Nothing here
// asserts the existential constants; every check returns both sides.

#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"
#include "pxlap/pde_solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pxlap {

/// mu = [R^{1-N/q0} ||f||_{L^q0(B_4R)}]^{1/(p_-^{4R} - 1)}.
/// Requires B_4R inside the grid box, R <= 1 and q0 > max{1, N/p_-^{4R}}.
double harnack_mu(const GridFunction& f, const Ball& ball, double q0, const ExponentField& field);

struct HarnackReport {
  Ball ball;
  double sup_u = 0.0;
  double inf_u = 0.0;
  double mu = 0.0;
  double c_emp = 0.0;  ///< sup_u / (inf_u + R + R mu)
  std::optional<ExponentBand> p_band;  ///< over B_4R, when a field was supplied

  /// sup_u / (inf_u + R mu): invariant under (t u, t^{p-1} f) for constant p.
  [[nodiscard]] double reduced_ratio() const;
};

/// sup and inf over the nodes of B_R. Throws if u < 0 at a node of B_4R.
HarnackReport harnack_check(const GridFunction& u, const Ball& ball, double mu);
HarnackReport harnack_check(const GridFunction& u, const Ball& ball, double mu, const ExponentField& field);

/// c_emp over R, R/2, R/4, ... (`levels` balls) with mu recomputed per radius.
struct ScaleSweep {
  std::vector<HarnackReport> reports;
  double drift = 1.0;     ///< max c_emp / min c_emp
  bool anomaly = false;   ///< drift > 2
};
ScaleSweep harnack_scale_sweep(const GridFunction& u, const GridFunction& f, const Point& center, double radius,
                               double q0, const ExponentField& field, int levels = 3);

/// "nondecreasing", "nonincreasing", "constant" or "mixed".
std::string classify_trend(const std::vector<double>& values);

/// c_emp for the family k v (v = solution of `base`) and for the re-solved
/// problem with boundary data k g, one entry per k. mu comes from base.rhs with q0 = inf.
struct DependenceProbe {
  std::vector<double> k;
  std::vector<double> c_scaled;
  std::vector<double> c_resolved;
  std::string trend_scaled;
  std::string trend_resolved;
};
DependenceProbe dependence_probe(const ProblemSpec& base, const Ball& ball, const std::vector<double>& ks);
void write_trend_csv(const std::string& path, const DependenceProbe& probe);

enum class HypothesisPolicy {
  require,  ///< throw unless u >= 1 on B_2r
  shift,    ///< evaluate on u + 1
  assume,   ///< caller asserts the hypothesis; only u >= 0 is enforced (t0 powers)
};

struct WeakHarnackResult {
  double lhs = 0.0;    ///< inf over B_r
  double rhs = 0.0;    ///< (mean over B_2r of u^t)^{1/t}
  double ratio = 0.0;  ///< lhs / rhs
  double t = 1.0;
  bool shifted = false;
};
WeakHarnackResult weak_harnack_check(const GridFunction& u, const Point& center, double r, double t0 = 1.0,
                                     HypothesisPolicy policy = HypothesisPolicy::require);

/// Upper end of the improved range: N(p-1)/(N-p) when p < N, +inf otherwise.
double improved_t_limit(int n, double p_minus);

/// (1 - (|x - x0|/rho)^2)^2, clipped at 0.
GridFunction bump_cutoff(const Grid& grid, const Point& center, double rho);
/// (1 - |x - x0|/rho)_+.
GridFunction hat_cutoff(const Grid& grid, const Point& center, double rho);

struct CaccioppoliResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double base_term = 0.0;      ///< int u^{g-1} eta^{p+}
  double cutoff_term = 0.0;    ///< int u^{g+p-1} eta^{p+-p} |grad eta|^p
  double source_term = 0.0;    ///< int H u^{g+p-1} eta^{p+}
  double p_minus = 0.0;
  double p_plus = 0.0;
  bool holds = false;
};
/// Both sides of
///   int u^{g-1}|grad u|^{p-} eta^{p+} <= int u^{g-1} eta^{p+}
///       + C |g|^{-p+} int u^{g+p-1} eta^{p+-p}|grad eta|^p + C |g|^{-1} int H u^{g+p-1} eta^{p+}
/// over `ball`, with p+- over the closed ball. Throws if u < 1 where eta > 0.
CaccioppoliResult caccioppoli_check(const GridFunction& u, double gamma, const GridFunction& eta,
                                    const GridFunction& h, const ExponentField& field, double c_probe,
                                    const Ball& ball);

struct LocalBoundResult {
  double sup_inner = 0.0;
  double norm_outer = 0.0;
  double bound = 0.0;  ///< c_probe (1 + ||u||_{L^t(outer)})
  bool holds = false;
};
/// Throws unless inner is compactly contained in outer.
LocalBoundResult local_bound_check(const GridFunction& u, const Region& inner, const Region& outer, double t,
                                   double c_probe);

/// True when `inner` lies in the interior of `outer`.
bool compactly_inside(const Region& inner, const Region& outer);

struct OscillationTrace {
  Point center;
  std::vector<double> radii;
  std::vector<double> oscillations;
  double fitted_exponent = 0.0;
  double fit_residual = 0.0;
  bool constant = false;  ///< every oscillation below the fit floor; no fit made
};
inline constexpr double kOscillationFloor = 1e-13;

/// Oscillations over nested balls and the OLS slope of log osc vs log r.
OscillationTrace holder_estimate(const GridFunction& u, const Point& center, const std::vector<double>& radii);

/// delta = 1 + (1 - N/q0)/(p - 1), with p = p2 when q0 > N, else p1.
double holder_delta_candidate(int n, double q0, double p1, double p2);

}  // namespace pxlap
