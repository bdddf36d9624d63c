#pragma once

// Dirichlet problem div(|grad u|^{p(x)-2} grad u) = f on a box, discretized as
// the minimizer of
//
//   J(u) = int |grad u|_eps^{p(x)} / p(x) dx + int f u dx,
//   |g|_eps = sqrt(|g|^2 + eps^2).
//
// Each cell carries 2^N forward-difference gradients, one per corner (built
// from the cell edges incident to that corner), each weighted |cell| / 2^N,
// with p taken at the cell center. The f u term uses nodal trapezoid weights,
// so dJ/du_i is exactly the weak residual against the nodal hat phi_i:
//   int A(grad u) . grad phi_i + int f phi_i.

#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace pxlap {

struct ProblemSpec {
  Grid grid;
  ExponentField field;
  GridFunction rhs;        ///< f, same lattice as `grid`
  GridFunction dirichlet;  ///< boundary node values are pinned; interior values ignored
  double reg_eps = 1e-8;
  double tol = 1e-10;      ///< on weak_residual
  int max_iter = 200;      ///< Newton iterations per continuation stage
  int continuation_steps = 0;  ///< extra stages with eps = reg_eps * 10^k, k = steps..1

  void validate() const;
};

struct SolveResult {
  GridFunction solution;
  std::vector<double> energy_trace;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string diagnostics;
};

double energy(const GridFunction& u, const ExponentField& field, const GridFunction& f,
              double reg_eps = 0.0);

/// dJ/du at every node (boundary entries included).
Eigen::VectorXd energy_gradient(const GridFunction& u, const ExponentField& field,
                                const GridFunction& f, double reg_eps = 0.0);

/// Discrete W^{1,p(.)} norm of each nodal hat function (0 on boundary nodes).
Eigen::VectorXd hat_norms(const Grid& grid, const ExponentField& field);

/// max over interior nodes of |dJ/du_i| / ||phi_i||_{1,p(.)}.
double weak_residual(const GridFunction& u, const ProblemSpec& spec);

SolveResult solve_dirichlet(const ProblemSpec& spec);

/// Smooth closed-form function with first and second derivatives.
struct ClosedForm {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<Eigen::MatrixXd(const Point&)> hessian;
};

/// Delta_{p(x)} w at x by the chain rule:
///   |grad w|^{p-2} [ lap w + (p-2) grad w^T D2w grad w / |grad w|^2
///                    + (grad p . grad w) log|grad w| ]
/// with |grad w| replaced by |grad w|_eps.
double p_laplacian_pointwise(const ClosedForm& w, const ExponentField& field, const Point& x,
                             double reg_eps = 0.0);

/// The bracket above, i.e. |grad w|_eps^{2-p} Delta_{p(x)} w. Finite even where
/// |grad w|^{p-2} under- or overflows.
double p_laplacian_bracket(const ClosedForm& w, const ExponentField& field, const Point& x,
                           double reg_eps = 0.0);

}  // namespace pxlap
