#include "aid/svm_qp.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <memory>
#include <stdexcept>
#include <vector>

#include "aid/error.hpp"

namespace aid {

namespace {

using Index = Eigen::Index;

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Q_st = y_s y_t K(x_s, x_t), served one column at a time.
class QMatrix {
public:
    virtual ~QMatrix() = default;
    virtual const double* column(Index i) = 0;
    double diagonal(Index i) const { return diagonal_[i]; }

protected:
    Vector diagonal_;
};

class DenseQ final : public QMatrix {
public:
    DenseQ(const Matrix& gram, const Vector& y) : q_(y.asDiagonal() * gram * y.asDiagonal()) {
        diagonal_ = q_.diagonal();
    }
    const double* column(Index i) override { return q_.col(i).data(); }

private:
    Matrix q_;
};

class CachedQ final : public QMatrix {
public:
    CachedQ(const RowMatrix& x, const Vector& y, const Kernel& kernel, std::size_t bytes)
        : x_(x), y_(y), kernel_(kernel), slot_(static_cast<std::size_t>(x.rows()), lru_.end()) {
        const auto k = static_cast<std::size_t>(x.rows());
        capacity_ = std::max<std::size_t>(2, bytes / (sizeof(double) * std::max<std::size_t>(k, 1)));
        diagonal_.resize(x.rows());
        for (Index i = 0; i < x.rows(); ++i) diagonal_[i] = kernel_(x_.row(i), x_.row(i));
        norms_ = x_.rowwise().squaredNorm();
    }

    const double* column(Index i) override {
        auto& it = slot_[static_cast<std::size_t>(i)];
        if (it != lru_.end()) {
            lru_.splice(lru_.begin(), lru_, it);
            return it->values.data();
        }
        Vector values;
        if (lru_.size() >= capacity_) {
            slot_[static_cast<std::size_t>(lru_.back().index)] = lru_.end();
            values = std::move(lru_.back().values);
            lru_.pop_back();
        }
        values.resize(x_.rows());
        values.noalias() = x_ * x_.row(i).transpose();
        if (kernel_.kind == KernelKind::rbf) {
            for (Index t = 0; t < values.size(); ++t) {
                values[t] = std::exp(-kernel_.gamma * std::max(0.0, norms_[t] + norms_[i] - 2.0 * values[t]));
            }
        }
        values.array() *= y_.array() * y_[i];
        lru_.push_front(Entry{i, std::move(values)});
        it = lru_.begin();
        return it->values.data();
    }

private:
    struct Entry {
        Index index;
        Vector values;
    };
    const RowMatrix& x_;
    const Vector& y_;
    Kernel kernel_;
    Vector norms_;
    std::list<Entry> lru_;
    std::vector<std::list<Entry>::iterator> slot_;
    std::size_t capacity_ = 2;
};

struct Problem {
    Index k = 0;
    Vector y;
    Vector upper;   // C_k = weight_k * M
    Vector linear;  // p in 1/2 a^T Q a + p^T a
    bool equality = true;
};

struct State {
    Vector alpha;
    Vector gradient;  // Q alpha + p
    std::size_t iterations = 0;
};

bool at_upper(const Problem& p, const State& s, Index t) { return s.alpha[t] >= p.upper[t]; }
bool at_lower(const Problem&, const State& s, Index t) { return s.alpha[t] <= 0.0; }

// m(alpha) - M(alpha) for the equality-constrained dual.
double equality_violation(const Problem& p, const State& s) {
    double up = -kInf;
    double low = kInf;
    for (Index t = 0; t < p.k; ++t) {
        const double value = -p.y[t] * s.gradient[t];
        const bool in_up = p.y[t] > 0 ? !at_upper(p, s, t) : !at_lower(p, s, t);
        const bool in_low = p.y[t] > 0 ? !at_lower(p, s, t) : !at_upper(p, s, t);
        if (in_up) up = std::max(up, value);
        if (in_low) low = std::min(low, value);
    }
    if (up == -kInf || low == kInf) return 0.0;
    return std::max(0.0, up - low);
}

// Largest projected-gradient magnitude for the box-only dual.
double box_violation(const Problem& p, const State& s, Index* arg = nullptr) {
    double worst = 0.0;
    for (Index t = 0; t < p.k; ++t) {
        const double g = s.gradient[t];
        double v = 0.0;
        if (g < 0.0 && !at_upper(p, s, t)) v = -g;
        if (g > 0.0 && !at_lower(p, s, t)) v = g;
        if (v > worst) {
            worst = v;
            if (arg) *arg = t;
        }
    }
    return worst;
}

double kkt_violation(const Problem& p, const State& s) {
    return p.equality ? equality_violation(p, s) : box_violation(p, s);
}

void update_gradient(State& s, const double* column, double change, Index k) {
    if (change == 0.0) return;
    for (Index t = 0; t < k; ++t) s.gradient[t] += change * column[t];
}

void recompute_gradient(const Problem& p, QMatrix& q, State& s);

// libsvm-style SMO with WSS2 (second order) pair selection and shrinking.
// Shrunk variables keep stale gradients; the full gradient is rebuilt before
// convergence is accepted.
void smo_equality(const Problem& p, QMatrix& q, State& s, double tolerance, std::size_t max_iterations) {
    const Index k = p.k;
    std::vector<Index> active(static_cast<std::size_t>(k));
    for (Index t = 0; t < k; ++t) active[static_cast<std::size_t>(t)] = t;
    const std::size_t shrink_period = static_cast<std::size_t>(std::min<Index>(k, 1000));
    std::size_t countdown = shrink_period;

    for (;;) {
        double gmax = -kInf;
        Index i = -1;
        for (const Index t : active) {
            if (p.y[t] > 0) {
                if (!at_upper(p, s, t) && -s.gradient[t] >= gmax) {
                    gmax = -s.gradient[t];
                    i = t;
                }
            } else if (!at_lower(p, s, t) && s.gradient[t] >= gmax) {
                gmax = s.gradient[t];
                i = t;
            }
        }
        Index j = -1;
        double gmax2 = -kInf;
        if (i >= 0) {
            const double* qi = q.column(i);
            const double qii = q.diagonal(i);
            double best = kInf;
            for (const Index t : active) {
                if (p.y[t] > 0) {
                    if (!at_lower(p, s, t)) {
                        const double diff = gmax + s.gradient[t];
                        gmax2 = std::max(gmax2, s.gradient[t]);
                        if (diff > 0.0) {
                            const double quad = qii + q.diagonal(t) - 2.0 * p.y[i] * qi[t];
                            const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
                            if (obj <= best) {
                                best = obj;
                                j = t;
                            }
                        }
                    }
                } else if (!at_upper(p, s, t)) {
                    const double diff = gmax - s.gradient[t];
                    gmax2 = std::max(gmax2, -s.gradient[t]);
                    if (diff > 0.0) {
                        const double quad = qii + q.diagonal(t) + 2.0 * p.y[i] * qi[t];
                        const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
                        if (obj <= best) {
                            best = obj;
                            j = t;
                        }
                    }
                }
            }
        }
        if (i < 0 || j < 0 || gmax + gmax2 < tolerance) {
            if (active.size() == static_cast<std::size_t>(k)) return;
            recompute_gradient(p, q, s);
            active.resize(static_cast<std::size_t>(k));
            for (Index t = 0; t < k; ++t) active[static_cast<std::size_t>(t)] = t;
            countdown = shrink_period;
            continue;
        }
        if (s.iterations >= max_iterations) {
            throw SolverError("SVM solver iteration limit reached", gmax + gmax2);
        }
        ++s.iterations;

        if (--countdown == 0) {
            countdown = shrink_period;
            std::erase_if(active, [&](Index t) {
                const double g = s.gradient[t];
                if (at_upper(p, s, t)) return p.y[t] > 0 ? -g > gmax2 : -g > gmax;
                if (at_lower(p, s, t)) return p.y[t] > 0 ? g > gmax : g > gmax2;
                return false;
            });
        }

        const double* qj = q.column(j);
        // Fetching i second keeps both columns resident in the LRU cache.
        const double* qi = q.column(i);
        const double ci = p.upper[i];
        const double cj = p.upper[j];
        const double old_i = s.alpha[i];
        const double old_j = s.alpha[j];
        double& ai = s.alpha[i];
        double& aj = s.alpha[j];

        if (p.y[i] != p.y[j]) {
            double quad = q.diagonal(i) + q.diagonal(j) + 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-s.gradient[i] - s.gradient[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > ci - cj) {
                if (ai > ci) {
                    ai = ci;
                    aj = ci - diff;
                }
            } else if (aj > cj) {
                aj = cj;
                ai = cj + diff;
            }
        } else {
            double quad = q.diagonal(i) + q.diagonal(j) - 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (s.gradient[i] - s.gradient[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > ci) {
                if (ai > ci) {
                    ai = ci;
                    aj = sum - ci;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > cj) {
                if (aj > cj) {
                    aj = cj;
                    ai = sum - cj;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        // Expressions like ci - diff can land one rounding step outside the box.
        ai = std::clamp(ai, 0.0, ci);
        aj = std::clamp(aj, 0.0, cj);
        const double di = ai - old_i;
        const double dj = aj - old_j;
        for (const Index t : active) s.gradient[t] += di * qi[t] + dj * qj[t];
    }
}

// Greedy coordinate descent for the box-only dual (fixed bias).
void coordinate_descent(const Problem& p, QMatrix& q, State& s, double tolerance, std::size_t max_iterations) {
    for (;;) {
        Index t = -1;
        const double worst = box_violation(p, s, &t);
        if (worst < tolerance || t < 0) return;
        if (s.iterations >= max_iterations) throw SolverError("SVM solver iteration limit reached", worst);
        ++s.iterations;
        const double qtt = q.diagonal(t);
        const double old = s.alpha[t];
        double next;
        if (qtt > kTau) {
            next = std::clamp(old - s.gradient[t] / qtt, 0.0, p.upper[t]);
        } else {
            next = s.gradient[t] < 0.0 ? p.upper[t] : 0.0;
        }
        s.alpha[t] = next;
        update_gradient(s, q.column(t), next - old, p.k);
    }
}

double bias_from_gradient(const Problem& p, const State& s) {
    double upper_bound = kInf;
    double lower_bound = -kInf;
    double sum_free = 0.0;
    Index free = 0;
    for (Index t = 0; t < p.k; ++t) {
        const double yg = p.y[t] * s.gradient[t];
        if (at_upper(p, s, t)) {
            if (p.y[t] < 0) upper_bound = std::min(upper_bound, yg);
            else lower_bound = std::max(lower_bound, yg);
        } else if (at_lower(p, s, t)) {
            if (p.y[t] > 0) upper_bound = std::min(upper_bound, yg);
            else lower_bound = std::max(lower_bound, yg);
        } else {
            ++free;
            sum_free += yg;
        }
    }
    double rho;
    if (free > 0) {
        rho = sum_free / static_cast<double>(free);
    } else if (std::isfinite(upper_bound) && std::isfinite(lower_bound)) {
        rho = 0.5 * (upper_bound + lower_bound);
    } else {
        rho = std::isfinite(upper_bound) ? upper_bound : (std::isfinite(lower_bound) ? lower_bound : 0.0);
    }
    return -rho;
}

void recompute_gradient(const Problem& p, QMatrix& q, State& s) {
    s.gradient = p.linear;
    for (Index t = 0; t < p.k; ++t) {
        if (s.alpha[t] != 0.0) update_gradient(s, q.column(t), s.alpha[t], p.k);
    }
}

// Solves the KKT equalities of the free variables for a minimal correction.
// Returns false (leaving `s` untouched) if the corrected point is not better.
bool polish(const Problem& p, QMatrix& q, State& s, double& bias) {
    std::vector<Index> free;
    for (Index t = 0; t < p.k; ++t) {
        if (!at_upper(p, s, t) && !at_lower(p, s, t)) free.push_back(t);
    }
    if (free.empty()) return false;
    const auto f = static_cast<Index>(free.size());
    const Index dim = p.equality ? f + 1 : f;
    Matrix system = Matrix::Zero(dim, dim);
    Vector rhs(dim);
    for (Index a = 0; a < f; ++a) {
        const double* col = q.column(free[static_cast<std::size_t>(a)]);
        for (Index c = 0; c < f; ++c) system(c, a) = col[free[static_cast<std::size_t>(c)]];
    }
    for (Index a = 0; a < f; ++a) {
        const Index t = free[static_cast<std::size_t>(a)];
        rhs[a] = -(s.gradient[t] + (p.equality ? bias * p.y[t] : 0.0));
    }
    if (p.equality) {
        for (Index a = 0; a < f; ++a) {
            const double yt = p.y[free[static_cast<std::size_t>(a)]];
            system(a, f) = yt;
            system(f, a) = yt;
        }
        rhs[f] = -p.y.dot(s.alpha);
    }
    const Vector step = system.completeOrthogonalDecomposition().solve(rhs);
    if (!step.allFinite()) return false;

    State trial = s;
    for (Index a = 0; a < f; ++a) {
        const Index t = free[static_cast<std::size_t>(a)];
        const double value = trial.alpha[t] + step[a];
        const double slack = 1e-9 * p.upper[t];
        if (value < -slack || value > p.upper[t] + slack) return false;
        trial.alpha[t] = std::clamp(value, 0.0, p.upper[t]);
    }
    recompute_gradient(p, q, trial);
    const double before = kkt_violation(p, s);
    const double after = kkt_violation(p, trial);
    if (!(after <= std::max(before, 1e-12))) return false;
    s = std::move(trial);
    if (p.equality) bias = bias_from_gradient(p, s);
    return true;
}

void validate(const SvmInstance& in) {
    const auto k = static_cast<Index>(in.y.size());
    if (k == 0) throw std::invalid_argument("SVM instance has no entities");
    if (in.weights.size() != k) throw std::invalid_argument("SVM weights do not match labels");
    if (in.uses_gram()) {
        if (in.gram.rows() != k || in.gram.cols() != k) throw std::invalid_argument("Gram matrix has wrong size");
    } else if (in.x.rows() != k) {
        throw std::invalid_argument("SVM features do not match labels");
    }
    if (!(in.penalty > 0.0) || !std::isfinite(in.penalty)) throw std::invalid_argument("SVM penalty must be positive");
    bool positive = false;
    bool negative = false;
    for (Index t = 0; t < k; ++t) {
        if (in.y[t] == 1.0) positive = true;
        else if (in.y[t] == -1.0) negative = true;
        else throw std::invalid_argument("SVM labels must be -1 or +1");
        if (!(in.weights[t] > 0.0) || !std::isfinite(in.weights[t])) {
            throw std::invalid_argument("SVM weights must be positive");
        }
    }
    if (!in.fixed_bias && !(positive && negative)) {
        throw std::invalid_argument("SVM instance needs both labels");
    }
}

}  // namespace

SvmSolution solve_weighted_svm(const SvmInstance& in, const SvmSolverOptions& options) {
    validate(in);
    const auto k = static_cast<Index>(in.y.size());

    Problem p;
    p.k = k;
    p.y = in.y;
    p.upper = in.weights * in.penalty;
    p.equality = !in.fixed_bias.has_value();
    p.linear = p.equality ? Vector(-Vector::Ones(k)) : Vector((in.y.array() * *in.fixed_bias - 1.0).matrix());

    std::unique_ptr<QMatrix> q;
    const std::size_t dense_bytes = static_cast<std::size_t>(k) * static_cast<std::size_t>(k) * sizeof(double);
    if (in.uses_gram()) {
        q = std::make_unique<DenseQ>(in.gram, in.y);
    } else if (dense_bytes <= options.cache_bytes) {
        q = std::make_unique<DenseQ>(gram_matrix(in.x, in.kernel), in.y);
    } else {
        q = std::make_unique<CachedQ>(in.x, in.y, in.kernel, options.cache_bytes);
    }

    const std::size_t limit = options.max_iterations != 0
                                  ? options.max_iterations
                                  : std::max<std::size_t>(10'000'000, 100 * static_cast<std::size_t>(k));
    State s;
    s.alpha = Vector::Zero(k);
    s.gradient = p.linear;

    auto run = [&](double tolerance) {
        if (p.equality) smo_equality(p, *q, s, tolerance, limit);
        else coordinate_descent(p, *q, s, tolerance, limit);
    };
    run(options.tolerance);

    double bias = p.equality ? bias_from_gradient(p, s) : *in.fixed_bias;
    bool polished = false;
    if (options.polish) {
        polished = polish(p, *q, s, bias);
        if (!polished) {
            run(std::min(options.tolerance, 1e-10));
            if (p.equality) bias = bias_from_gradient(p, s);
            polished = polish(p, *q, s, bias);
        }
    }

    SvmSolution out;
    out.alpha = s.alpha;
    out.b = bias;
    out.iterations = s.iterations;
    out.polished = polished;
    out.kkt_violation = kkt_violation(p, s);

    // (Q alpha)_t = y_t sum_s alpha_s y_s K_st, so f_t = y_t (G_t - p_t) + b.
    const Vector q_alpha = s.gradient - p.linear;
    out.decision = (in.y.array() * q_alpha.array() + bias).matrix();
    if (!in.uses_gram() && in.kernel.is_linear()) {
        out.w = in.x.transpose() * in.y.cwiseProduct(s.alpha);
        out.norm_squared = out.w.squaredNorm();
        out.decision = in.x * out.w;
        out.decision.array() += bias;
    } else {
        out.norm_squared = std::max(0.0, s.alpha.dot(q_alpha));
    }
    out.xi = (1.0 - in.y.array() * out.decision.array()).cwiseMax(0.0).matrix();

    long double penalty_sum = 0.0L;
    for (Index t = 0; t < k; ++t) penalty_sum += static_cast<long double>(p.upper[t]) * out.xi[t];
    out.primal = static_cast<double>(0.5L * out.norm_squared + penalty_sum);
    out.dual = -(0.5 * s.alpha.dot(q_alpha) + p.linear.dot(s.alpha));
    return out;
}

}  // namespace aid
