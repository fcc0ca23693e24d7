#include "qardl/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qardl/errors.hpp"
#include "qardl/stats.hpp"

namespace qardl {

namespace {

constexpr int kSimplexMaxRows = 5000;

// Exterior-point simplex over basic solutions. A state is a set of k row
// indices h with X_h invertible and beta = X_h^{-1} y_h; the 2k edge
// directions out of a vertex change the fitted value of one basis row by
// +-1 while holding the others fixed.
class VertexSolver {
 public:
  VertexSolver(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double gamma)
      : X_(X),
        y_(y),
        gamma_(gamma),
        n_(X.rows()),
        k_(X.cols()),
        etol_(1e-10 * (1.0 + y.cwiseAbs().maxCoeff())) {}

  // Rows picked by column-pivoted QR of X' span all k coordinates.
  std::vector<Eigen::Index> default_basis() const {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X_.transpose());
    if (qr.rank() < k_) {
      throw EstimationError("quantile: design is rank deficient");
    }
    std::vector<Eigen::Index> h(static_cast<std::size_t>(k_));
    for (Eigen::Index j = 0; j < k_; ++j) h[static_cast<std::size_t>(j)] = qr.colsPermutation().indices()(j);
    std::sort(h.begin(), h.end());
    return h;
  }

  // Rows ordered by |residual| around a candidate beta, taken greedily while
  // they keep the basis full rank. Used to polish interior-point solutions.
  std::vector<Eigen::Index> basis_near(const Eigen::VectorXd& beta) const {
    Eigen::VectorXd e = y_ - X_ * beta;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_));
    for (Eigen::Index i = 0; i < n_; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      const double ea = std::fabs(e(a));
      const double eb = std::fabs(e(b));
      return ea != eb ? ea < eb : a < b;
    });
    std::vector<Eigen::Index> h;
    Eigen::MatrixXd M(k_, k_);
    for (Eigen::Index i : order) {
      if (static_cast<Eigen::Index>(h.size()) == k_) break;
      M.row(static_cast<Eigen::Index>(h.size())) = X_.row(i);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(
          M.topRows(static_cast<Eigen::Index>(h.size()) + 1));
      if (qr.rank() == static_cast<Eigen::Index>(h.size()) + 1) h.push_back(i);
    }
    if (static_cast<Eigen::Index>(h.size()) < k_) {
      throw EstimationError("quantile: design is rank deficient");
    }
    std::sort(h.begin(), h.end());
    return h;
  }

  // Runs descent from the given basis, then canonicalizes across flat edges.
  void solve(std::vector<Eigen::Index> basis) {
    basis_ = std::move(basis);
    refresh();
    const long cap = 50 * static_cast<long>(n_) + 1000;
    iterations_ = 0;
    while (true) {
      if (++iterations_ > cap) {
        throw EstimationError(
            "quantile: solver exceeded iteration cap; optimality gap " +
            std::to_string(worst_gap_));
      }
      int j;
      int s;
      if (!steepest_descent(j, s)) break;  // optimal
      take_step(j, s, /*flat=*/false);
    }
    canonicalize();
  }

  const Eigen::VectorXd& beta() const { return beta_; }
  int iterations() const { return iterations_; }
  double optimality_gap() const { return worst_gap_; }

 private:
  // Recomputes the basis factorization, coefficients, residuals, and edge
  // rates V(i, j) = x_i' X_h^{-1} e_j from scratch.
  void refresh() {
    Eigen::MatrixXd B(k_, k_);
    Eigen::VectorXd yh(k_);
    for (Eigen::Index j = 0; j < k_; ++j) {
      B.row(j) = X_.row(basis_[static_cast<std::size_t>(j)]);
      yh(j) = y_(basis_[static_cast<std::size_t>(j)]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    beta_ = lu.solve(yh);
    ginv_ = lu.inverse();
    rates_ = X_ * ginv_;
    resid_ = y_ - X_ * beta_;
    in_basis_.assign(static_cast<std::size_t>(n_), false);
    for (Eigen::Index i : basis_) in_basis_[static_cast<std::size_t>(i)] = true;
  }

  // Right derivative of the objective along edge (j, s). Basis row j's
  // residual moves off zero at rate -s; non-basis residuals at rate -s*V(i,j).
  double directional_derivative(int j, int s, double* rate_mass) const {
    double d = s > 0 ? (1.0 - gamma_) : gamma_;
    double mass = 1.0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (in_basis_[static_cast<std::size_t>(i)]) continue;
      const double v = s * rates_(i, j);
      mass += std::fabs(v);
      const double e = resid_(i);
      if (std::fabs(e) <= etol_) {
        d += v > 0 ? v * (1.0 - gamma_) : -v * gamma_;  // rho_gamma(-v)
      } else {
        d -= v * (gamma_ - (e < 0.0 ? 1.0 : 0.0));
      }
    }
    if (rate_mass) *rate_mass = mass;
    return d;
  }

  // Picks the steepest strictly descending edge; false when none (optimal).
  bool steepest_descent(int& j_out, int& s_out) {
    double best = 0.0;
    worst_gap_ = 0.0;
    bool found = false;
    for (int j = 0; j < k_; ++j) {
      for (int s : {+1, -1}) {
        double mass;
        const double d = directional_derivative(j, s, &mass);
        const double scaled = d / mass;
        worst_gap_ = std::min(worst_gap_, scaled);
        if (scaled < -tol_ && d < best) {
          best = d;
          j_out = j;
          s_out = s;
          found = true;
        }
      }
    }
    return found;
  }

  // Piecewise-linear line search along edge (j, s): slope starts at the
  // directional derivative and jumps by |v_i| where residual i crosses zero.
  // Stops at the first breakpoint making the slope non-negative and pivots
  // that row into the basis. flat=true starts from slope 0 (canonical slides).
  bool take_step(int j, int s, bool flat) {
    struct Crossing {
      double t;
      double jump;
      Eigen::Index row;
    };
    std::vector<Crossing> crossings;
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (in_basis_[static_cast<std::size_t>(i)]) continue;
      const double v = s * rates_(i, j);
      const double e = resid_(i);
      if (std::fabs(e) <= etol_ || v == 0.0) continue;
      const double t = e / v;
      if (t > 0.0) crossings.push_back({t, std::fabs(v), i});
    }
    std::sort(crossings.begin(), crossings.end(), [](const Crossing& a, const Crossing& b) {
      return a.t != b.t ? a.t < b.t : a.row < b.row;
    });
    double slope = flat ? 0.0 : directional_derivative(j, s, nullptr);
    for (const auto& c : crossings) {
      slope += c.jump;
      if (slope >= 0.0) {
        basis_[static_cast<std::size_t>(j)] = c.row;
        refresh();
        return true;
      }
    }
    if (flat) return false;  // flat edge unbounded; nothing to slide to
    throw EstimationError("quantile: descent direction unbounded (singular problem)");
  }

  // Among optimal vertices, walks flat edges while doing so produces a
  // lexicographically smaller coefficient vector. Ensures deterministic
  // tie-breaks; on an intercept-only design this lands on the lower quantile.
  void canonicalize() {
    const int cap = 8 * static_cast<int>(k_) + 32;
    for (int round = 0; round < cap; ++round) {
      bool moved = false;
      for (int j = 0; j < k_ && !moved; ++j) {
        for (int s : {+1, -1}) {
          double mass;
          const double d = directional_derivative(j, s, &mass);
          if (std::fabs(d) / mass > tol_) continue;  // not flat
          const Eigen::VectorXd before = beta_;
          const auto saved_basis = basis_;
          if (!take_step(j, s, /*flat=*/true)) continue;
          if (lex_less(beta_, before)) {
            moved = true;
            break;
          }
          basis_ = saved_basis;  // undo
          refresh();
        }
      }
      if (!moved) return;
    }
  }

  static bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double tol = 1e-9 * (1.0 + std::fabs(b(i)));
      if (a(i) < b(i) - tol) return true;
      if (a(i) > b(i) + tol) return false;
    }
    return false;
  }

  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& y_;
  double gamma_;
  Eigen::Index n_;
  Eigen::Index k_;
  double etol_;
  double tol_ = 1e-9;

  std::vector<Eigen::Index> basis_;
  std::vector<bool> in_basis_;
  Eigen::VectorXd beta_;
  Eigen::MatrixXd ginv_;   // X_h^{-1}
  Eigen::MatrixXd rates_;  // X * X_h^{-1}
  Eigen::VectorXd resid_;
  long iterations_ = 0;
  double worst_gap_ = 0.0;
};

// Primal-dual interior point on the bounded-dual LP
//   max y'a  s.t.  X'a = (1-gamma) X'1,  0 <= a <= 1;
// the equality multipliers converge to the regression coefficients.
Eigen::VectorXd interior_point_beta(const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& y, double gamma,
                                    int& iterations) {
  const Eigen::Index n = X.rows();
  const double nn = static_cast<double>(n);
  const Eigen::VectorXd b = (1.0 - gamma) * (X.transpose() * Eigen::VectorXd::Ones(n));

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 - gamma);
  Eigen::VectorXd s = Eigen::VectorXd::Constant(n, gamma);
  Eigen::VectorXd beta = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(X).solve(y);
  Eigen::VectorXd r = y - X * beta;
  const double eps = 1e-4 * (1.0 + r.cwiseAbs().maxCoeff());
  Eigen::VectorXd z = r.cwiseMax(0.0).array() + eps;
  Eigen::VectorXd w = (-r).cwiseMax(0.0).array() + eps;

  const double scale = 1.0 + y.cwiseAbs().maxCoeff();
  const int max_iter = 200;
  for (iterations = 0; iterations < max_iter; ++iterations) {
    const Eigen::VectorXd r1 = y - X * beta - z + w;
    const Eigen::VectorXd r2 = b - X.transpose() * x;
    const double gap = x.dot(z) + s.dot(w);
    if (gap < 1e-10 * nn * scale && r1.cwiseAbs().maxCoeff() < 1e-9 * scale &&
        r2.cwiseAbs().maxCoeff() < 1e-9 * scale) {
      break;
    }
    const double mu = 0.1 * gap / (2.0 * nn);
    const Eigen::ArrayXd r4 = mu - x.array() * z.array();
    const Eigen::ArrayXd r5 = mu - s.array() * w.array();
    const Eigen::ArrayXd dinv = z.array() / x.array() + w.array() / s.array();
    const Eigen::ArrayXd d = 1.0 / dinv;
    const Eigen::ArrayXd rhs_part = r1.array() - r4 / x.array() + r5 / s.array();

    const Eigen::MatrixXd xdx =
        X.transpose() * d.matrix().asDiagonal() * X;
    const Eigen::VectorXd rhs =
        r2 + X.transpose() * (d * rhs_part).matrix();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xdx);
    if (ldlt.info() != Eigen::Success) {
      throw EstimationError("quantile: interior-point normal equations singular");
    }
    const Eigen::VectorXd dbeta = ldlt.solve(rhs);
    const Eigen::ArrayXd dx = d * ((X * dbeta).array() - rhs_part);
    const Eigen::ArrayXd ds = -dx;
    const Eigen::ArrayXd dz = (r4 - z.array() * dx) / x.array();
    const Eigen::ArrayXd dw = (r5 - w.array() * ds) / s.array();

    auto max_step = [](const Eigen::ArrayXd& v, const Eigen::ArrayXd& dv) {
      double a = 1.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
      }
      return a;
    };
    const double ap = 0.9995 * std::min(max_step(x.array(), dx), max_step(s.array(), ds));
    const double ad = 0.9995 * std::min(max_step(z.array(), dz), max_step(w.array(), dw));
    x.array() += std::min(ap, 1.0) * dx;
    s.array() += std::min(ap, 1.0) * ds;
    beta += std::min(ad, 1.0) * dbeta;
    z.array() += std::min(ad, 1.0) * dz;
    w.array() += std::min(ad, 1.0) * dw;
  }
  return beta;
}

// Coefficient sampling covariance from the Powell kernel sandwich with the
// Hall-Sheather bandwidth (the standard "ker" estimator).
Eigen::MatrixXd powell_covariance(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& residuals, double gamma) {
  const Eigen::Index n = X.rows();
  const double nn = static_cast<double>(n);

  const double zg = normal_quantile(gamma);
  const double phi = normal_pdf(zg);
  double h = std::pow(nn, -1.0 / 3.0) * std::pow(normal_quantile(0.975), 2.0 / 3.0) *
             std::pow(1.5 * phi * phi / (2.0 * zg * zg + 1.0), 1.0 / 3.0);
  h = std::min(h, 0.999 * std::min(gamma, 1.0 - gamma));

  std::vector<double> e(residuals.data(), residuals.data() + n);
  const double mean = residuals.mean();
  const double sd = std::sqrt((residuals.array() - mean).square().sum() / (nn - 1.0));
  const double iqr =
      empirical_quantile_lower(e, 0.75) - empirical_quantile_lower(e, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  double bw = (normal_quantile(gamma + h) - normal_quantile(gamma - h)) * spread;
  bw = std::max(bw, 1e-12 * (1.0 + sd));

  Eigen::ArrayXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) f(i) = normal_pdf(residuals(i) / bw) / bw;
  const Eigen::MatrixXd xfx = X.transpose() * f.matrix().asDiagonal() * X;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xfx);
  if (ldlt.info() != Eigen::Success) {
    throw EstimationError("quantile: kernel covariance matrix singular");
  }
  const Eigen::MatrixXd xfx_inv =
      ldlt.solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  Eigen::MatrixXd cov =
      gamma * (1.0 - gamma) * xfx_inv * (X.transpose() * X) * xfx_inv;
  return 0.5 * (cov + cov.transpose().eval());
}

void validate_problem(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("quantile: gamma must lie strictly inside (0,1)");
  }
  if (y.size() != X.rows()) throw EstimationError("quantile: X and y row counts differ");
  if (X.rows() <= X.cols()) {
    throw EstimationError("quantile: need more observations than columns");
  }
}

// Vertex solution without covariance (shared by fit and bootstrap).
Eigen::VectorXd solve_vertex(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             double gamma, QrMethod method, int& iterations,
                             double& gap, std::string& how) {
  VertexSolver solver(X, y, gamma);
  const bool big = X.rows() > kSimplexMaxRows;
  const bool use_ip =
      method == QrMethod::interior_point || (method == QrMethod::automatic && big);
  if (use_ip) {
    int ip_iters = 0;
    const Eigen::VectorXd beta0 = interior_point_beta(X, y, gamma, ip_iters);
    solver.solve(solver.basis_near(beta0));
    iterations = ip_iters + solver.iterations();
    how = "interior-point";
  } else {
    solver.solve(solver.default_basis());
    iterations = solver.iterations();
    how = "simplex";
  }
  gap = solver.optimality_gap();
  return solver.beta();
}

}  // namespace

double check_loss(const Eigen::VectorXd& residuals, double gamma) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    const double e = residuals(i);
    total += e * (gamma - (e < 0.0 ? 1.0 : 0.0));
  }
  return total;
}

QrFit quantile_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   double gamma, const std::vector<std::string>& names,
                   QrMethod method) {
  validate_problem(X, y, gamma);
  (void)names;
  QrFit fit;
  fit.quantile = gamma;
  fit.coefficients =
      solve_vertex(X, y, gamma, method, fit.iterations, fit.optimality_gap, fit.method);
  fit.fitted = X * fit.coefficients;
  fit.residuals = y - fit.fitted;
  fit.objective = check_loss(fit.residuals, gamma);
  fit.covariance = powell_covariance(X, fit.residuals, gamma);
  return fit;
}

Eigen::MatrixXd quantile_bootstrap_covariance(const Eigen::MatrixXd& X,
                                              const Eigen::VectorXd& y,
                                              double gamma, int replications,
                                              std::uint64_t seed, Execution exec) {
  validate_problem(X, y, gamma);
  if (replications < 2) throw ConfigError("bootstrap: need at least 2 replications");
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  Eigen::MatrixXd draws(replications, k);

  parallel_for(static_cast<std::size_t>(replications), exec, [&](std::size_t rep) {
    Rng rng(derive_seed(seed, rep));
    Eigen::MatrixXd xb(n, k);
    Eigen::VectorXd yb(n);
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (Eigen::Index i = 0; i < n; ++i) {
        auto pick = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n));
        pick = std::min(pick, n - 1);
        xb.row(i) = X.row(pick);
        yb(i) = y(pick);
      }
      try {
        int iters;
        double gap;
        std::string how;
        draws.row(static_cast<Eigen::Index>(rep)) =
            solve_vertex(xb, yb, gamma, QrMethod::automatic, iters, gap, how);
        return;
      } catch (const EstimationError&) {
        // degenerate resample (rank loss); redraw within the same stream
      }
    }
    throw EstimationError("bootstrap: replication failed 100 consecutive redraws");
  });

  const Eigen::RowVectorXd mean = draws.colwise().mean();
  const Eigen::MatrixXd centered = draws.rowwise() - mean;
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(replications - 1);
  return 0.5 * (cov + cov.transpose().eval());
}

}  // namespace qardl
