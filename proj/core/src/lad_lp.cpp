#include "aid/lad_lp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aid/error.hpp"

namespace aid {

namespace {

using Index = Eigen::Index;

// Columns kept after rank reduction, in increasing order.
std::vector<Index> independent_columns(const RowMatrix& x) {
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    qr.setThreshold(1e-10);
    const Index rank = qr.rank();
    std::vector<Index> cols(static_cast<std::size_t>(rank));
    for (Index j = 0; j < rank; ++j) cols[static_cast<std::size_t>(j)] = qr.colsPermutation().indices()[j];
    std::sort(cols.begin(), cols.end());
    return cols;
}

Vector weighted_least_squares(const RowMatrix& x, const Vector& y, const Vector& w) {
    const Vector root = w.cwiseSqrt();
    const Matrix scaled = root.asDiagonal() * x;
    return scaled.colPivHouseholderQr().solve(root.cwiseProduct(y));
}

// Mehrotra predictor-corrector on the bounded dual LP
//   min -y^T u  s.t.  X^T u = X^T w,  0 <= u <= 2w    (u = d + w),
// whose equality multipliers are -beta. Used only to produce a starting point.
Vector interior_point_start(const RowMatrix& x, const Vector& y, const Vector& w, std::size_t& iterations) {
    const Index k = x.rows();
    const Vector upper = 2.0 * w;
    const Vector c = -y;
    const Vector rhs = x.transpose() * w;

    Vector beta = weighted_least_squares(x, y, w);
    Vector res = y - x * beta;
    const double shift = 0.1 * res.cwiseAbs().mean() + 1e-3;

    Vector u = w;
    Vector s = upper - u;
    Vector lambda = -beta;
    Vector z = (-res).cwiseMax(0.0).array() + shift;
    Vector v = res.cwiseMax(0.0).array() + shift;

    const double rhs_scale = 1.0 + rhs.norm();
    const double c_scale = 1.0 + c.norm();

    auto max_step = [](const Vector& value, const Vector& step) {
        double alpha = 1.0;
        for (Index i = 0; i < value.size(); ++i) {
            if (step[i] < 0.0) alpha = std::min(alpha, -value[i] / step[i]);
        }
        return alpha;
    };

    iterations = 0;
    for (; iterations < 80; ++iterations) {
        const Vector r_p = rhs - x.transpose() * u;
        const Vector r_d = c - x * lambda - z + v;
        const double mu = (u.dot(z) + s.dot(v)) / (2.0 * static_cast<double>(k));
        const double objective = c.dot(u);
        if (r_p.norm() / rhs_scale < 1e-10 && r_d.norm() / c_scale < 1e-10 &&
            mu * 2.0 * static_cast<double>(k) / (1.0 + std::abs(objective)) < 1e-11) {
            break;
        }

        const Vector d = (z.cwiseQuotient(u) + v.cwiseQuotient(s)).cwiseInverse();
        const Matrix normal = x.transpose() * d.asDiagonal() * x;
        Eigen::LDLT<Matrix> ldlt(normal);
        if (ldlt.info() != Eigen::Success) break;

        auto direction = [&](const Vector& r_uz, const Vector& r_sv, Vector& du, Vector& dz, Vector& dv,
                             Vector& dl) {
            const Vector rho = r_d - r_uz.cwiseQuotient(u) + r_sv.cwiseQuotient(s);
            dl = ldlt.solve(r_p + x.transpose() * d.cwiseProduct(rho));
            du = d.cwiseProduct(x * dl - rho);
            dz = (r_uz - z.cwiseProduct(du)).cwiseQuotient(u);
            dv = (r_sv + v.cwiseProduct(du)).cwiseQuotient(s);
        };

        Vector du, dz, dv, dl;
        direction(-u.cwiseProduct(z), -s.cwiseProduct(v), du, dz, dv, dl);
        double alpha_p = std::min(max_step(u, du), max_step(s, -du));
        double alpha_d = std::min(max_step(z, dz), max_step(v, dv));
        const Vector u_aff = u + alpha_p * du;
        const Vector s_aff = s - alpha_p * du;
        const double mu_aff = (u_aff.dot(z + alpha_d * dz) + s_aff.dot(v + alpha_d * dv)) /
                              (2.0 * static_cast<double>(k));
        const double sigma = std::pow(mu_aff / mu, 3.0);

        const Vector r_uz = (sigma * mu - u.cwiseProduct(z).array()).matrix() - du.cwiseProduct(dz);
        const Vector r_sv = (sigma * mu - s.cwiseProduct(v).array()).matrix() + du.cwiseProduct(dv);
        direction(r_uz, r_sv, du, dz, dv, dl);
        alpha_p = std::min(1.0, 0.995 * std::min(max_step(u, du), max_step(s, -du)));
        alpha_d = std::min(1.0, 0.995 * std::min(max_step(z, dz), max_step(v, dv)));

        u += alpha_p * du;
        s = upper - u;
        s = s.cwiseMax(1e-300);
        u = u.cwiseMax(1e-300);
        lambda += alpha_d * dl;
        z += alpha_d * dz;
        v += alpha_d * dv;
    }
    return -lambda;
}

// Picks `rank` linearly independent rows, preferring rows listed first.
std::vector<Index> choose_basis(const RowMatrix& x, const std::vector<Index>& order, Index rank) {
    std::vector<Index> basis;
    Matrix q(rank, rank);
    Index found = 0;
    for (const Index i : order) {
        if (found == rank) break;
        Vector v = x.row(i).transpose();
        const double norm = v.norm();
        if (norm == 0.0) continue;
        v /= norm;
        for (int pass = 0; pass < 2; ++pass) {
            for (Index c = 0; c < found; ++c) v -= q.col(c).dot(v) * q.col(c);
        }
        const double rest = v.norm();
        if (rest > 1e-7) {
            q.col(found++) = v / rest;
            basis.push_back(i);
        }
    }
    if (found < rank) {
        // Ill-conditioned data: fall back to full pivoting on the whole matrix.
        Eigen::FullPivLU<Matrix> lu(x.transpose());
        basis.clear();
        for (Index c = 0; c < rank; ++c) basis.push_back(lu.permutationQ().indices()[c]);
    }
    return basis;
}

class BasisSimplex {
public:
    BasisSimplex(const RowMatrix& x, const Vector& y, const Vector& w, double tolerance)
        : x_(x), y_(y), w_(w), tolerance_(tolerance), k_(x.rows()), r_(x.cols()),
          side_(static_cast<std::size_t>(k_), 1), in_basis_(static_cast<std::size_t>(k_), -1) {
        weight_floor_ = w_.mean();
    }

    std::size_t run(std::vector<Index> basis, std::size_t max_iterations) {
        basis_ = std::move(basis);
        for (std::size_t p = 0; p < basis_.size(); ++p) in_basis_[static_cast<std::size_t>(basis_[p])] = static_cast<Index>(p);
        std::size_t degenerate_streak = 0;
        bool bland = false;
        for (std::size_t iteration = 0;; ++iteration) {
            refresh();
            const auto leaving = pick_leaving(bland);
            if (!leaving) return iteration;
            if (iteration >= max_iterations) {
                throw SolverError("LAD simplex iteration limit reached", worst_violation_);
            }
            const double step = pivot(*leaving, bland);
            if (step <= 1e-14 * (1.0 + beta_.cwiseAbs().maxCoeff())) {
                if (++degenerate_streak > 50) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }
        }
    }

    const Vector& beta() const { return beta_; }

    double dual_objective() const {
        long double total = 0.0L;
        for (Index i = 0; i < k_; ++i) {
            const Index p = in_basis_[static_cast<std::size_t>(i)];
            const double d = p >= 0 ? dual_basis_[p] : side_[static_cast<std::size_t>(i)] * w_[i];
            total += static_cast<long double>(d) * y_[i];
        }
        return static_cast<double>(total);
    }

private:
    double zero_tolerance(Index i) const { return 1e-10 * (1.0 + std::abs(y_[i])); }

    void refresh() {
        Matrix xb(r_, r_);
        Vector yb(r_);
        for (Index p = 0; p < r_; ++p) {
            xb.row(p) = x_.row(basis_[static_cast<std::size_t>(p)]);
            yb[p] = y_[basis_[static_cast<std::size_t>(p)]];
        }
        lu_.compute(xb);
        lu_t_.compute(xb.transpose());
        beta_ = lu_.solve(yb);
        residual_ = y_ - x_ * beta_;
        Vector z = Vector::Zero(r_);
        for (Index i = 0; i < k_; ++i) {
            auto& s = side_[static_cast<std::size_t>(i)];
            if (in_basis_[static_cast<std::size_t>(i)] >= 0) {
                residual_[i] = 0.0;
                continue;
            }
            if (std::abs(residual_[i]) > zero_tolerance(i)) s = residual_[i] > 0.0 ? 1 : -1;
            z += (s * w_[i]) * x_.row(i).transpose();
        }
        dual_basis_ = -lu_t_.solve(z);
    }

    struct Leaving {
        Index position;
        double sign;
    };

    std::optional<Leaving> pick_leaving(bool bland) {
        std::optional<Leaving> best;
        double best_score = 0.0;
        Index best_row = k_;
        worst_violation_ = 0.0;
        for (Index p = 0; p < r_; ++p) {
            const Index row = basis_[static_cast<std::size_t>(p)];
            const double d = dual_basis_[p];
            const double excess = std::abs(d) - w_[row];
            const double limit = tolerance_ * std::max(w_[row], weight_floor_);
            if (excess <= limit) continue;
            worst_violation_ = std::max(worst_violation_, excess);
            const double score = excess / w_[row];
            const bool better = bland ? row < best_row : score > best_score;
            if (better) {
                best = Leaving{p, d > 0.0 ? 1.0 : -1.0};
                best_score = score;
                best_row = row;
            }
        }
        return best;
    }

    double pivot(const Leaving& leaving, bool bland) {
        Vector e = Vector::Zero(r_);
        e[leaving.position] = -leaving.sign;
        const Vector delta = lu_.solve(e);
        const Vector g = x_ * delta;
        const double delta_norm = delta.norm();

        struct Breakpoint {
            double t;
            double g_abs;
            Index row;
        };
        std::vector<Breakpoint> points;
        for (Index i = 0; i < k_; ++i) {
            if (in_basis_[static_cast<std::size_t>(i)] >= 0) continue;
            const double gi = g[i];
            if (std::abs(gi) <= 1e-9 * x_.row(i).norm() * delta_norm) continue;
            if (side_[static_cast<std::size_t>(i)] * gi <= 0.0) continue;
            points.push_back({std::max(0.0, residual_[i] / gi), std::abs(gi), i});
        }
        std::sort(points.begin(), points.end(), [bland](const Breakpoint& a, const Breakpoint& b) {
            if (a.t != b.t) return a.t < b.t;
            if (bland) return a.row < b.row;
            if (a.g_abs != b.g_abs) return a.g_abs > b.g_abs;
            return a.row < b.row;
        });

        const Index leaving_row = basis_[static_cast<std::size_t>(leaving.position)];
        double slope = w_[leaving_row] - std::abs(dual_basis_[leaving.position]);
        std::size_t entering = points.size();
        for (std::size_t b = 0; b < points.size(); ++b) {
            slope += 2.0 * w_[points[b].row] * points[b].g_abs;
            if (slope >= 0.0) {
                entering = b;
                break;
            }
        }
        if (entering == points.size()) {
            throw SolverError("LAD simplex found no blocking row; data may be degenerate");
        }
        for (std::size_t b = 0; b < entering; ++b) {
            auto& s = side_[static_cast<std::size_t>(points[b].row)];
            s = static_cast<signed char>(-s);
        }
        const Index q = points[entering].row;
        side_[static_cast<std::size_t>(leaving_row)] = static_cast<signed char>(leaving.sign);
        in_basis_[static_cast<std::size_t>(leaving_row)] = -1;
        in_basis_[static_cast<std::size_t>(q)] = leaving.position;
        basis_[static_cast<std::size_t>(leaving.position)] = q;
        return points[entering].t * delta_norm;
    }

    const RowMatrix& x_;
    const Vector& y_;
    const Vector& w_;
    double tolerance_;
    Index k_;
    Index r_;
    double weight_floor_ = 1.0;
    double worst_violation_ = 0.0;
    std::vector<signed char> side_;
    std::vector<Index> in_basis_;
    std::vector<Index> basis_;
    Eigen::PartialPivLU<Matrix> lu_;
    Eigen::PartialPivLU<Matrix> lu_t_;
    Vector beta_;
    Vector residual_;
    Vector dual_basis_;
};

}  // namespace

double weighted_absolute_loss(const RowMatrix& x, const Vector& y, const Vector& w, const Vector& beta) {
    const Vector fit = x * beta;
    long double total = 0.0L;
    for (Index i = 0; i < y.size(); ++i) {
        total += static_cast<long double>(w[i]) * std::abs(static_cast<long double>(y[i]) - fit[i]);
    }
    return static_cast<double>(total);
}

LadSolution solve_weighted_lad(const RowMatrix& x, const Vector& y, const Vector& w,
                               const LadSolverOptions& options) {
    const Index k = x.rows();
    if (k == 0) throw std::invalid_argument("LAD instance has no rows");
    if (y.size() != k || w.size() != k) throw std::invalid_argument("LAD instance dimensions disagree");
    if ((w.array() <= 0.0).any() || !w.allFinite()) throw std::invalid_argument("LAD weights must be positive");

    LadSolution out;
    out.beta = Vector::Zero(x.cols());
    const std::vector<Index> cols = independent_columns(x);
    out.rank = cols.size();
    if (cols.empty()) {
        out.objective = weighted_absolute_loss(x, y, w, out.beta);
        out.dual_objective = out.objective;
        return out;
    }

    const auto r = static_cast<Index>(cols.size());
    RowMatrix reduced(k, r);
    for (Index c = 0; c < r; ++c) reduced.col(c) = x.col(cols[static_cast<std::size_t>(c)]);

    Vector start;
    const bool large = static_cast<std::size_t>(k) * static_cast<std::size_t>(r) > options.simplex_size_limit;
    if ((large || options.force_interior_point) && k > r) {
        start = interior_point_start(reduced, y, w, out.interior_iterations);
    } else {
        start = weighted_least_squares(reduced, y, w);
    }

    const Vector res = (y - reduced * start).cwiseAbs();
    std::vector<Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&res](Index a, Index b) { return res[a] < res[b]; });

    const std::size_t limit = options.max_iterations != 0
                                  ? options.max_iterations
                                  : 50 * static_cast<std::size_t>(k + r) + 1000;
    BasisSimplex simplex(reduced, y, w, options.tolerance);
    out.simplex_iterations = simplex.run(choose_basis(reduced, order, r), limit);
    for (Index c = 0; c < r; ++c) out.beta[cols[static_cast<std::size_t>(c)]] = simplex.beta()[c];
    out.objective = weighted_absolute_loss(x, y, w, out.beta);
    out.dual_objective = simplex.dual_objective();
    return out;
}

}  // namespace aid
