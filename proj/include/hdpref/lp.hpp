#ifndef HDPREF_LP_HPP
#define HDPREF_LP_HPP

// Dense two-phase simplex for the small linear programs used by the regret
// oracle and the utility-polytope search. Problems here have at most a few
// dozen rows and columns, so a full tableau is the simplest exact method.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hdpref {

enum class LpStatus { optimal, infeasible, unbounded };

/// maximize objective·x  subject to  ineq·x <= ineq_rhs,  eq·x = eq_rhs,  x >= 0.
template <typename Scalar>
struct LinearProgram {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector objective;
  Matrix ineq;
  Vector ineq_rhs;
  Matrix eq;
  Vector eq_rhs;

  explicit LinearProgram(Eigen::Index num_vars = 0)
      : objective(Vector::Zero(num_vars)),
        ineq(0, num_vars),
        ineq_rhs(0),
        eq(0, num_vars),
        eq_rhs(0) {}

  Eigen::Index num_vars() const { return objective.size(); }

  template <typename Row>
  void add_le(const Eigen::MatrixBase<Row>& row, Scalar rhs) {
    ineq.conservativeResize(ineq.rows() + 1, num_vars());
    ineq.row(ineq.rows() - 1) = row.transpose().template cast<Scalar>();
    ineq_rhs.conservativeResize(ineq_rhs.size() + 1);
    ineq_rhs(ineq_rhs.size() - 1) = rhs;
  }

  template <typename Row>
  void add_eq(const Eigen::MatrixBase<Row>& row, Scalar rhs) {
    eq.conservativeResize(eq.rows() + 1, num_vars());
    eq.row(eq.rows() - 1) = row.transpose().template cast<Scalar>();
    eq_rhs.conservativeResize(eq_rhs.size() + 1);
    eq_rhs(eq_rhs.size() - 1) = rhs;
  }
};

template <typename Scalar>
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  typename LinearProgram<Scalar>::Vector x;
  Scalar value = Scalar(0);

  bool optimal() const { return status == LpStatus::optimal; }
};

namespace detail {

template <typename Scalar>
class Tableau {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Tableau(const LinearProgram<Scalar>& lp, Scalar tol) : tol_(tol) {
    const Eigen::Index n = lp.num_vars();
    const Eigen::Index m_ineq = lp.ineq.rows();
    const Eigen::Index m_eq = lp.eq.rows();
    rows_ = m_ineq + m_eq;

    // Column layout: [structural | slacks | artificials | rhs].
    Eigen::Index num_art = m_eq;
    for (Eigen::Index i = 0; i < m_ineq; ++i) {
      if (lp.ineq_rhs(i) < Scalar(0)) ++num_art;
    }
    num_structural_ = n;
    first_art_ = n + m_ineq;
    cols_ = first_art_ + num_art;

    table_ = Matrix::Zero(rows_, cols_ + 1);
    basis_.assign(static_cast<std::size_t>(rows_), -1);

    Eigen::Index art = first_art_;
    for (Eigen::Index i = 0; i < m_ineq; ++i) {
      const Scalar sign = lp.ineq_rhs(i) < Scalar(0) ? Scalar(-1) : Scalar(1);
      table_.row(i).head(n) = sign * lp.ineq.row(i);
      table_(i, n + i) = sign;
      table_(i, cols_) = sign * lp.ineq_rhs(i);
      if (sign > Scalar(0)) {
        basis_[i] = n + i;
      } else {
        table_(i, art) = Scalar(1);
        basis_[i] = art++;
      }
    }
    for (Eigen::Index k = 0; k < m_eq; ++k) {
      const Eigen::Index i = m_ineq + k;
      const Scalar sign = lp.eq_rhs(k) < Scalar(0) ? Scalar(-1) : Scalar(1);
      table_.row(i).head(n) = sign * lp.eq.row(k);
      table_(i, cols_) = sign * lp.eq_rhs(k);
      table_(i, art) = Scalar(1);
      basis_[i] = art++;
    }
  }

  LpSolution<Scalar> solve(const Vector& objective) {
    LpSolution<Scalar> out;
    if (first_art_ < cols_) {
      Vector phase1 = Vector::Zero(cols_);
      phase1.segment(first_art_, cols_ - first_art_).setConstant(Scalar(-1));
      allowed_cols_ = cols_;
      if (!optimize(phase1)) {
        throw std::logic_error("simplex: phase one cannot be unbounded");
      }
      if (current_value(phase1) < -tol_ * Scalar(10)) {
        out.status = LpStatus::infeasible;
        return out;
      }
      drive_out_artificials();
    }

    Vector phase2 = Vector::Zero(cols_);
    phase2.head(num_structural_) = objective;
    allowed_cols_ = first_art_;
    if (!optimize(phase2)) {
      out.status = LpStatus::unbounded;
      return out;
    }

    out.status = LpStatus::optimal;
    out.x = Vector::Zero(num_structural_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[i] >= 0 && basis_[i] < num_structural_) out.x(basis_[i]) = table_(i, cols_);
    }
    out.value = objective.dot(out.x);
    return out;
  }

 private:
  Scalar current_value(const Vector& cost) const {
    Scalar v(0);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[i] >= 0) v += cost(basis_[i]) * table_(i, cols_);
    }
    return v;
  }

  // Returns false when the objective is unbounded.
  bool optimize(const Vector& cost) {
    constexpr int kMaxPivots = 100000;
    constexpr int kDegenerateBeforeBland = 50;
    int degenerate_run = 0;
    bool bland = false;

    for (int iter = 0; iter < kMaxPivots; ++iter) {
      // Reduced costs d_j = c_j - c_B^T column_j.
      Eigen::Index entering = -1;
      Scalar best(0);
      for (Eigen::Index j = 0; j < allowed_cols_; ++j) {
        Scalar d = cost(j);
        for (Eigen::Index i = 0; i < rows_; ++i) {
          if (basis_[i] >= 0 && table_(i, j) != Scalar(0)) d -= cost(basis_[i]) * table_(i, j);
        }
        if (d > tol_) {
          if (bland) {
            entering = j;
            break;
          }
          if (d > best) {
            best = d;
            entering = j;
          }
        }
      }
      if (entering < 0) return true;

      Eigen::Index leaving = -1;
      Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const Scalar a = table_(i, entering);
        if (a > tol_) {
          const Scalar ratio = table_(i, cols_) / a;
          if (ratio < best_ratio - tol_ ||
              (ratio <= best_ratio + tol_ && leaving >= 0 && basis_[i] < basis_[leaving])) {
            best_ratio = ratio;
            leaving = i;
          }
        }
      }
      if (leaving < 0) return false;

      if (best_ratio <= tol_) {
        if (++degenerate_run > kDegenerateBeforeBland) bland = true;
      } else {
        degenerate_run = 0;
      }
      pivot(leaving, entering);
    }
    throw std::runtime_error("simplex: pivot limit exceeded");
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    table_.row(r) /= table_(r, c);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const Scalar f = table_(i, c);
      if (f != Scalar(0)) table_.row(i) -= f * table_.row(r);
    }
    basis_[r] = c;
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[i] < first_art_) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < first_art_; ++j) {
        if (std::abs(table_(i, j)) > tol_) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        // Redundant row: zero it so it never constrains phase two.
        table_.row(i).setZero();
        basis_[i] = -1;
      }
    }
  }

  Scalar tol_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  Eigen::Index num_structural_ = 0;
  Eigen::Index first_art_ = 0;
  Eigen::Index allowed_cols_ = 0;
  Matrix table_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

template <typename Scalar>
LpSolution<Scalar> solve(const LinearProgram<Scalar>& lp, Scalar tol = Scalar(1e-9)) {
  if (lp.ineq.cols() != lp.num_vars() || lp.eq.cols() != lp.num_vars() ||
      lp.ineq.rows() != lp.ineq_rhs.size() || lp.eq.rows() != lp.eq_rhs.size()) {
    throw std::invalid_argument("linear program: inconsistent dimensions");
  }
  detail::Tableau<Scalar> tableau(lp, tol);
  return tableau.solve(lp.objective);
}

}  // namespace hdpref

#endif  // HDPREF_LP_HPP
