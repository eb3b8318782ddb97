#include "clarkbmo/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "clarkbmo/error.hpp"

namespace clarkbmo {

std::vector<double> singular_values(const CMatrix& m) {
  if (m.size() == 0) return {};
  if (!m.allFinite()) throw Error("matrix has non-finite entries");
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

double operator_norm(const CMatrix& m) {
  const auto s = singular_values(m);
  return s.empty() ? 0.0 : s.front();
}

PowerIterationResult power_iteration_norm(const CMatrix& m, int max_iter, double tol) {
  PowerIterationResult out;
  if (m.size() == 0) {
    out.converged = true;
    return out;
  }
  const auto n = m.cols();
  // Deterministic start with no special alignment to any basis direction.
  Eigen::VectorXcd v(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    v(k) = cplx(1.0 + 0.37 * k, 0.61 - 0.23 * k);
  }
  v.normalize();
  double prev = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXcd mv = m * v;
    const double est = mv.norm();
    out.iterations = it;
    out.norm = est;
    if (est == 0.0) {
      out.converged = true;
      return out;
    }
    Eigen::VectorXcd w = m.adjoint() * mv;
    const double wn = w.norm();
    if (wn == 0.0) {
      out.converged = true;
      return out;
    }
    v = w / wn;
    if (std::abs(est - prev) <= tol * est) {
      out.converged = true;
      break;
    }
    prev = est;
  }
  return out;
}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, double tol)
      : m_(lp.A.rows()), n_(lp.A.cols()), tol_(tol), t_(m_, n_ + m_ + 1), sign_(m_), basis_(m_) {
    t_.setZero();
    for (Eigen::Index i = 0; i < m_; ++i) {
      sign_(i) = lp.b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign_(i) * lp.A.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, n_ + m_) = sign_(i) * lp.b(i);
      basis_[i] = n_ + i;
    }
  }

  /// Runs simplex iterations for the given column costs; entering restricted to j < limit.
  /// Reduced costs are recomputed from the tableau each step so drift cannot accumulate.
  void optimize(const Eigen::VectorXd& cost, Eigen::Index limit) {
    const int max_pivots = 50000;
    for (;;) {
      Eigen::VectorXd reduced = cost.head(limit);
      for (Eigen::Index i = 0; i < m_; ++i) {
        reduced -= cost(basis_[i]) * t_.row(i).head(limit).transpose();
      }
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (reduced(j) < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      const double colmax = t_.col(enter).head(m_).cwiseAbs().maxCoeff();
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a <= 1e-9 * colmax) continue;
        const double ratio = std::max(0.0, t_(i, n_ + m_)) / a;
        if (leave < 0 || ratio < best - 1e-13 ||
            (ratio <= best + 1e-13 && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) throw Error("LP unbounded");
      pivot(leave, enter);
      if (++pivots_ > max_pivots) throw Error("LP iteration limit");
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  /// Moves artificial columns out of the basis where a structural pivot exists.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double rhs(Eigen::Index i) const { return t_(i, n_ + m_); }
  Eigen::Index basic(Eigen::Index i) const { return basis_[i]; }
  int pivots() const { return pivots_; }

  /// y = c_B B^{-1} S, where S is the row-sign normalization.
  Eigen::VectorXd duals(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      y += cost(basis_[i]) * t_.row(i).segment(n_, m_).transpose();
    }
    return y.cwiseProduct(sign_);
  }

 private:
  Eigen::Index m_;
  Eigen::Index n_;
  double tol_;
  Eigen::MatrixXd t_;
  Eigen::VectorXd sign_;
  std::vector<Eigen::Index> basis_;
  int pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol) {
  const Eigen::Index m = lp.A.rows();
  const Eigen::Index n = lp.A.cols();
  if (lp.b.size() != m || lp.c.size() != n) throw Error("LP dimension mismatch");
  Tableau tab(lp, tol);

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.optimize(phase1, n + m);
  double infeas = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basic(i) >= n) infeas += tab.rhs(i);
  }
  if (infeas > tol * (1.0 + lp.b.cwiseAbs().sum())) throw Error("LP infeasible");
  tab.expel_artificials();

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = lp.c;
  tab.optimize(phase2, n);

  LpSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basic(i) < n) sol.x(tab.basic(i)) = std::max(0.0, tab.rhs(i));
  }
  sol.value = lp.c.dot(sol.x);
  sol.duals = tab.duals(phase2);
  sol.pivots = tab.pivots();
  return sol;
}

}  // namespace clarkbmo
