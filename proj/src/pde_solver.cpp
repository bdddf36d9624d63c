#include "pxlap/pde_solver.hpp"

#include "pxlap/variable_lebesgue.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pxlap {

void ProblemSpec::validate() const {
  if (!rhs.grid().same_lattice(grid)) throw std::invalid_argument("ProblemSpec: rhs lattice mismatch");
  if (!dirichlet.grid().same_lattice(grid)) {
    throw std::invalid_argument("ProblemSpec: boundary data lattice mismatch");
  }
  if (!(reg_eps >= 0.0)) throw std::invalid_argument("ProblemSpec: reg_eps must be >= 0");
  if (reg_eps == 0.0 && field.p1() < 2.0) {
    throw std::invalid_argument("ProblemSpec: reg_eps = 0 needs p1 >= 2 (singular flux at zero gradient)");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("ProblemSpec: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("ProblemSpec: max_iter must be >= 1");
  if (continuation_steps < 0) throw std::invalid_argument("ProblemSpec: continuation_steps must be >= 0");
}

namespace {

// Per-cell exponent cache and the corner-stencil loops shared by the energy,
// its gradient and its Hessian.
class CornerStencil {
 public:
  CornerStencil(const Grid& grid, const ExponentField& field)
      : grid_(grid), n_(grid.dim()), corners_(grid.corner_count()),
        weight_(grid.cell_volume() / grid.corner_count()), p_cell_(grid.cell_count()) {
    for (Index c = 0; c < grid.cell_count(); ++c) p_cell_[c] = field(grid.cell_center(c));
    inv_h_.resize(n_);
    for (int k = 0; k < n_; ++k) inv_h_[k] = 1.0 / grid.spacing()[k];
  }

  [[nodiscard]] const Eigen::VectorXd& p_cell() const { return p_cell_; }

  // Calls fn(cell, base node, neighbor nodes[k], signed 1/h[k], gradient, p) per cell corner.
  template <class Fn>
  void for_each_corner(const Eigen::VectorXd& u, Fn&& fn) const {
    std::vector<Index> nbr(static_cast<std::size_t>(n_));
    std::vector<double> sgn(static_cast<std::size_t>(n_));
    Eigen::VectorXd g(n_);
    for (Index c = 0; c < grid_.cell_count(); ++c) {
      const double p = p_cell_[c];
      for (unsigned m = 0; m < corners_; ++m) {
        const Index base = grid_.cell_corner(c, m);
        for (int k = 0; k < n_; ++k) {
          const unsigned bit = 1U << k;
          nbr[static_cast<std::size_t>(k)] = grid_.cell_corner(c, m ^ bit);
          sgn[static_cast<std::size_t>(k)] = (m & bit) ? -inv_h_[k] : inv_h_[k];
          g[k] = sgn[static_cast<std::size_t>(k)] * (u[nbr[static_cast<std::size_t>(k)]] - u[base]);
        }
        fn(c, base, nbr, sgn, g, p);
      }
    }
  }

  [[nodiscard]] double weight() const { return weight_; }

 private:
  const Grid& grid_;
  int n_;
  unsigned corners_;
  double weight_;
  Eigen::VectorXd p_cell_;
  Eigen::VectorXd inv_h_;
};

double source_term(const Grid& grid, const Eigen::VectorXd& u, const Eigen::VectorXd& f) {
  double acc = 0.0;
  for (Index i = 0; i < grid.node_count(); ++i) acc += grid.nodal_volume(i) * f[i] * u[i];
  return acc;
}

double energy_impl(const CornerStencil& st, const Grid& grid, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& f, double eps) {
  double acc = 0.0;
  const double eps2 = eps * eps;
  st.for_each_corner(u, [&](Index, Index, const auto&, const auto&, const Eigen::VectorXd& g, double p) {
    const double s = g.squaredNorm() + eps2;
    if (s > 0.0) acc += std::pow(s, 0.5 * p) / p;
  });
  return st.weight() * acc + source_term(grid, u, f);
}

Eigen::VectorXd gradient_impl(const CornerStencil& st, const Grid& grid, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& f, double eps) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(grid.node_count());
  const double eps2 = eps * eps;
  const double w = st.weight();
  st.for_each_corner(u, [&](Index, Index base, const std::vector<Index>& nbr, const std::vector<double>& sgn,
                            const Eigen::VectorXd& g, double p) {
    const double s = g.squaredNorm() + eps2;
    if (s == 0.0) return;
    const double a = std::pow(s, 0.5 * (p - 2.0));
    for (std::size_t k = 0; k < nbr.size(); ++k) {
      const double flux = w * a * g[static_cast<Index>(k)] * sgn[k];
      r[nbr[k]] += flux;
      r[base] -= flux;
    }
  });
  for (Index i = 0; i < grid.node_count(); ++i) r[i] += grid.nodal_volume(i) * f[i];
  return r;
}

using SparseMatrix = Eigen::SparseMatrix<double>;

// Hessian restricted to the unknowns (interior nodes); `unknown[i]` is -1 on the boundary.
SparseMatrix hessian_impl(const CornerStencil& st, const Grid& grid, const Eigen::VectorXd& u,
                          double eps, const std::vector<Index>& unknown, Index n_unknown) {
  std::vector<Eigen::Triplet<double>> trip;
  const int n = grid.dim();
  trip.reserve(static_cast<std::size_t>(grid.cell_count() * grid.corner_count() * (n + 1) * (n + 1)));
  const double eps2 = eps * eps;
  const double w = st.weight();
  Eigen::MatrixXd d(n, n + 1);
  std::vector<Index> local(static_cast<std::size_t>(n + 1));
  st.for_each_corner(u, [&](Index, Index base, const std::vector<Index>& nbr, const std::vector<double>& sgn,
                            const Eigen::VectorXd& g, double p) {
    const double s = g.squaredNorm() + eps2;
    Eigen::MatrixXd h;
    if (s == 0.0) {
      if (p > 2.0) return;
      h = Eigen::MatrixXd::Identity(n, n);  // p == 2; p < 2 is excluded by ProblemSpec::validate
    } else {
      const double a = std::pow(s, 0.5 * (p - 2.0));
      h = a * Eigen::MatrixXd::Identity(n, n) + ((p - 2.0) * a / s) * (g * g.transpose());
    }
    d.setZero();
    local[0] = base;
    for (int k = 0; k < n; ++k) {
      d(k, 0) = -sgn[static_cast<std::size_t>(k)];
      d(k, k + 1) = sgn[static_cast<std::size_t>(k)];
      local[static_cast<std::size_t>(k + 1)] = nbr[static_cast<std::size_t>(k)];
    }
    const Eigen::MatrixXd kl = w * d.transpose() * h * d;
    for (int a = 0; a <= n; ++a) {
      const Index ia = unknown[static_cast<std::size_t>(local[static_cast<std::size_t>(a)])];
      if (ia < 0) continue;
      for (int b = 0; b <= n; ++b) {
        const Index ib = unknown[static_cast<std::size_t>(local[static_cast<std::size_t>(b)])];
        if (ib < 0) continue;
        trip.emplace_back(ia, ib, kl(a, b));
      }
    }
  });
  SparseMatrix hm(n_unknown, n_unknown);
  hm.setFromTriplets(trip.begin(), trip.end());
  return hm;
}

Eigen::VectorXd hat_norms_impl(const Grid& grid, const Eigen::VectorXd& p_cell) {
  const int n = grid.dim();
  const unsigned corners = grid.corner_count();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.node_count());
  const double vol = grid.cell_volume();
  std::vector<int> multi;
  for (Index i = 0; i < grid.node_count(); ++i) {
    if (grid.on_boundary(i)) continue;
    multi = grid.node_multi_index(i);
    WeightedSamples val{Eigen::VectorXd(corners), Eigen::VectorXd(corners), Eigen::VectorXd::Constant(corners, vol)};
    WeightedSamples grad{Eigen::VectorXd(corners * corners), Eigen::VectorXd(corners * corners),
                         Eigen::VectorXd::Constant(corners * corners, vol / corners)};
    // The 2^N cells sharing node i; node i is corner `mi` of cell `cell`.
    for (unsigned mi = 0; mi < corners; ++mi) {
      std::vector<int> cm = multi;
      for (int k = 0; k < n; ++k) {
        if (mi & (1U << k)) cm[static_cast<std::size_t>(k)] -= 1;
      }
      Index cell = 0;
      Index cstride = 1;
      for (int k = n - 1; k >= 0; --k) {
        cell += cm[static_cast<std::size_t>(k)] * cstride;
        cstride *= grid.dims()[static_cast<std::size_t>(k)] - 1;
      }
      const double p = p_cell[cell];
      val.values[mi] = 1.0 / corners;
      val.exponents[mi] = p;
      for (unsigned m = 0; m < corners; ++m) {
        double g2 = 0.0;
        if (m == mi) {
          for (int k = 0; k < n; ++k) g2 += std::pow(1.0 / grid.spacing()[k], 2);
        } else {
          const unsigned diff = m ^ mi;
          if ((diff & (diff - 1)) == 0) {
            const int k = std::countr_zero(diff);
            g2 = std::pow(1.0 / grid.spacing()[k], 2);
          }
        }
        grad.values[mi * corners + m] = std::sqrt(g2);
        grad.exponents[mi * corners + m] = p;
      }
    }
    out[i] = luxemburg_norm(val, NormConfig{1e-10, 200}) + luxemburg_norm(grad, NormConfig{1e-10, 200});
  }
  return out;
}

double normalized_residual(const Grid& grid, const Eigen::VectorXd& r, const Eigen::VectorXd& norms) {
  double worst = 0.0;
  for (Index i = 0; i < grid.node_count(); ++i) {
    if (grid.on_boundary(i)) continue;
    worst = std::max(worst, std::abs(r[i]) / norms[i]);
  }
  return worst;
}

void require_lattice(const GridFunction& a, const GridFunction& b, const char* what) {
  if (!a.grid().same_lattice(b.grid())) throw std::invalid_argument(std::string(what) + ": lattice mismatch");
}

}  // namespace

double energy(const GridFunction& u, const ExponentField& field, const GridFunction& f, double reg_eps) {
  require_lattice(u, f, "energy");
  const CornerStencil st(u.grid(), field);
  return energy_impl(st, u.grid(), u.values(), f.values(), reg_eps);
}

Eigen::VectorXd energy_gradient(const GridFunction& u, const ExponentField& field, const GridFunction& f,
                                double reg_eps) {
  require_lattice(u, f, "energy_gradient");
  const CornerStencil st(u.grid(), field);
  return gradient_impl(st, u.grid(), u.values(), f.values(), reg_eps);
}

Eigen::VectorXd hat_norms(const Grid& grid, const ExponentField& field) {
  const CornerStencil st(grid, field);
  return hat_norms_impl(grid, st.p_cell());
}

double weak_residual(const GridFunction& u, const ProblemSpec& spec) {
  if (!u.grid().same_lattice(spec.grid)) throw std::invalid_argument("weak_residual: lattice mismatch");
  const CornerStencil st(spec.grid, spec.field);
  const Eigen::VectorXd r = gradient_impl(st, spec.grid, u.values(), spec.rhs.values(), spec.reg_eps);
  return normalized_residual(spec.grid, r, hat_norms_impl(spec.grid, st.p_cell()));
}

SolveResult solve_dirichlet(const ProblemSpec& spec) {
  spec.validate();
  const Grid& grid = spec.grid;
  const CornerStencil st(grid, spec.field);
  const Eigen::VectorXd norms = hat_norms_impl(grid, st.p_cell());
  const Eigen::VectorXd& f = spec.rhs.values();

  std::vector<Index> unknown(static_cast<std::size_t>(grid.node_count()), -1);
  Index n_unknown = 0;
  for (Index i = 0; i < grid.node_count(); ++i) {
    if (!grid.on_boundary(i)) unknown[static_cast<std::size_t>(i)] = n_unknown++;
  }
  auto gather = [&](const Eigen::VectorXd& full) {
    Eigen::VectorXd out(n_unknown);
    for (Index i = 0; i < grid.node_count(); ++i) {
      if (unknown[static_cast<std::size_t>(i)] >= 0) out[unknown[static_cast<std::size_t>(i)]] = full[i];
    }
    return out;
  };
  auto scatter_add = [&](Eigen::VectorXd& full, const Eigen::VectorXd& d, double t) {
    for (Index i = 0; i < grid.node_count(); ++i) {
      if (unknown[static_cast<std::size_t>(i)] >= 0) full[i] += t * d[unknown[static_cast<std::size_t>(i)]];
    }
  };

  Eigen::VectorXd u = spec.dirichlet.values();
  for (Index i = 0; i < grid.node_count(); ++i) {
    if (unknown[static_cast<std::size_t>(i)] >= 0) u[i] = 0.0;
  }

  SolveResult result{GridFunction(grid, u), {}, 0.0, 0, false, {}};
  std::ostringstream diag;

  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  if (n_unknown > 0) {
    // Warm start: the p = 2 problem with the same data (one exact Newton step).
    const CornerStencil laplace(grid, ExponentField::constant(2.0));
    const Eigen::VectorXd r0 = gather(gradient_impl(laplace, grid, u, f, 0.0));
    ldlt.compute(hessian_impl(laplace, grid, u, 0.0, unknown, n_unknown));
    if (ldlt.info() == Eigen::Success) scatter_add(u, ldlt.solve(-r0), 1.0);
  }

  std::vector<double> stages;
  for (int k = spec.continuation_steps; k >= 1; --k) stages.push_back(spec.reg_eps * std::pow(10.0, k));
  stages.push_back(spec.reg_eps);

  double residual = std::numeric_limits<double>::infinity();
  int total_iter = 0;
  for (std::size_t stage = 0; stage < stages.size(); ++stage) {
    const double eps = stages[stage];
    const bool last = stage + 1 == stages.size();
    const double stage_tol = last ? spec.tol : std::max(spec.tol, 1e-6);
    double e = energy_impl(st, grid, u, f, eps);
    result.energy_trace.push_back(e);

    for (int it = 0; it < spec.max_iter; ++it) {
      const Eigen::VectorXd full_r = gradient_impl(st, grid, u, f, eps);
      residual = normalized_residual(grid, full_r, norms);
      if (residual <= stage_tol || n_unknown == 0) break;
      const Eigen::VectorXd r = gather(full_r);

      Eigen::VectorXd dir;
      bool newton = false;
      ldlt.compute(hessian_impl(st, grid, u, eps, unknown, n_unknown));
      if (ldlt.info() == Eigen::Success) {
        dir = ldlt.solve(-r);
        newton = dir.allFinite() && r.dot(dir) < 0.0;
      }
      if (!newton) dir = -r;

      // Predicted decrease below the round-off of J: the energy can no longer rank
      // iterates, so take the full Newton step only if it lowers the residual.
      // These polishing steps are left out of the energy trace.
      if (newton && -r.dot(dir) <= 1e-13 * std::max(1.0, std::abs(e))) {
        Eigen::VectorXd u_try = u;
        scatter_add(u_try, dir, 1.0);
        const double res_try =
            u_try.allFinite() ? normalized_residual(grid, gradient_impl(st, grid, u_try, f, eps), norms) : residual;
        if (!(res_try < residual)) {
          diag << "residual floor " << residual << " reached at iteration " << total_iter << " (eps=" << eps << "); ";
          break;
        }
        u = std::move(u_try);
        e = energy_impl(st, grid, u, f, eps);
        ++total_iter;
        continue;
      }

      auto line_search = [&](const Eigen::VectorXd& d, double t0, double& e_new, Eigen::VectorXd& u_new) {
        const double slope = r.dot(d);
        double t = t0;
        for (int ls = 0; ls < 80; ++ls, t *= 0.5) {
          u_new = u;
          scatter_add(u_new, d, t);
          if (!u_new.allFinite()) continue;
          e_new = energy_impl(st, grid, u_new, f, eps);
          if (e_new <= e + 1e-4 * t * slope) return true;
        }
        return false;
      };

      double e_new = e;
      Eigen::VectorXd u_new;
      bool accepted = line_search(dir, 1.0, e_new, u_new);
      if (!accepted && newton) {
        dir = -r;
        accepted = line_search(dir, 1.0 / std::max(r.cwiseAbs().maxCoeff(), 1e-300), e_new, u_new);
      }
      if (!accepted) {
        diag << "line search stalled at iteration " << total_iter << " (eps=" << eps << ", residual=" << residual
             << "); ";
        break;
      }
      if (!u_new.allFinite()) throw std::runtime_error("solve_dirichlet: non-finite iterate");
      u = std::move(u_new);
      e = e_new;
      result.energy_trace.push_back(e);
      ++total_iter;
    }
  }

  const Eigen::VectorXd full_r = gradient_impl(st, grid, u, f, spec.reg_eps);
  residual = normalized_residual(grid, full_r, norms);
  if (!u.allFinite()) throw std::runtime_error("solve_dirichlet: non-finite solution");
  result.solution = GridFunction(grid, u);
  result.residual = residual;
  result.iterations = total_iter;
  result.converged = residual <= spec.tol;
  if (!result.converged) diag << "residual " << residual << " above tol " << spec.tol;
  result.diagnostics = diag.str();
  return result;
}

// ---------------------------------------------------------------------------

double p_laplacian_bracket(const ClosedForm& w, const ExponentField& field, const Point& x, double reg_eps) {
  const Point g = w.gradient(x);
  const Eigen::MatrixXd hess = w.hessian(x);
  const double p = field(x);
  const double s = g.squaredNorm() + reg_eps * reg_eps;
  if (s == 0.0) {
    if (p < 2.0) throw std::domain_error("p_laplacian: zero gradient with p < 2 and no regularization");
    return hess.trace();
  }
  const double lap = hess.trace();
  const double quad = g.dot(hess * g) / s;
  const double logterm = field.gradient(x).dot(g) * 0.5 * std::log(s);
  return lap + (p - 2.0) * quad + logterm;
}

double p_laplacian_pointwise(const ClosedForm& w, const ExponentField& field, const Point& x, double reg_eps) {
  const Point g = w.gradient(x);
  const double p = field(x);
  const double s = g.squaredNorm() + reg_eps * reg_eps;
  if (s == 0.0) {
    if (p < 2.0) throw std::domain_error("p_laplacian: zero gradient with p < 2 and no regularization");
    // Limits of the chain-rule expression: lap w when p = 2, 0 when p > 2.
    return p == 2.0 ? w.hessian(x).trace() : 0.0;
  }
  return std::pow(s, 0.5 * (p - 2.0)) * p_laplacian_bracket(w, field, x, reg_eps);
}

}  // namespace pxlap
