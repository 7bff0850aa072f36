#include "eslab/simplex.hpp"

#include "eslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace eslab {

LinearProgram LinearProgram::nonnegative(std::size_t n_variables) {
    const auto n = static_cast<Eigen::Index>(n_variables);
    return LinearProgram{Vector::Zero(n), Matrix(0, n), Vector(0), {}, Vector::Zero(n),
                         Vector::Constant(n, kInf)};
}

LinearProgram LinearProgram::free(std::size_t n_variables) {
    const auto n = static_cast<Eigen::Index>(n_variables);
    return LinearProgram{Vector::Zero(n), Matrix(0, n), Vector(0), {}, Vector::Constant(n, -kInf),
                         Vector::Constant(n, kInf)};
}

void LinearProgram::add_row(const Vector& coefficients, Relation relation, double rhs_value) {
    if (coefficients.size() != objective.size()) {
        throw DimensionError("constraint row length vs variables", n_variables(),
                             static_cast<std::size_t>(coefficients.size()));
    }
    const auto m = constraints.rows();
    constraints.conservativeResize(m + 1, objective.size());
    constraints.row(m) = coefficients.transpose();
    rhs.conservativeResize(m + 1);
    rhs(m) = rhs_value;
    relations.push_back(relation);
}

void LinearProgram::validate() const {
    const auto n = n_variables();
    const auto m = n_constraints();
    if (static_cast<std::size_t>(constraints.cols()) != n) {
        throw DimensionError("constraint matrix columns vs variables", n,
                             static_cast<std::size_t>(constraints.cols()));
    }
    if (static_cast<std::size_t>(constraints.rows()) != m) {
        throw DimensionError("constraint matrix rows vs rhs", m, static_cast<std::size_t>(constraints.rows()));
    }
    if (relations.size() != m) {
        throw DimensionError("row relations vs rhs", m, relations.size());
    }
    if (static_cast<std::size_t>(lower.size()) != n) {
        throw DimensionError("lower bounds vs variables", n, static_cast<std::size_t>(lower.size()));
    }
    if (static_cast<std::size_t>(upper.size()) != n) {
        throw DimensionError("upper bounds vs variables", n, static_cast<std::size_t>(upper.size()));
    }
    if (!objective.allFinite() || !constraints.allFinite() || !rhs.allFinite()) {
        throw DomainError("linear program data must be finite");
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (std::isnan(lower(jj)) || std::isnan(upper(jj)) || lower(jj) == kInf || upper(jj) == -kInf) {
            throw DomainError("invalid bounds on variable " + std::to_string(j));
        }
    }
}

namespace {

// x_j = shift_j + sign_j * y_j, with y_j >= 0 unless the variable is kept free.
struct VariableMap {
    std::vector<double> shift;
    std::vector<double> sign;
    std::vector<char> free;
};

double power_of_two_reciprocal(double magnitude) {
    if (magnitude == 0.0 || !std::isfinite(magnitude)) {
        return 1.0;
    }
    return std::ldexp(1.0, -std::ilogb(magnitude));
}

class Tableau {
  public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(cols + 1), data_(rows * (cols + 1), 0.0), obj_(cols + 1, 0.0),
          basis_(rows, 0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double* row(std::size_t i) noexcept { return data_.data() + i * stride_; }
    const double* row(std::size_t i) const noexcept { return data_.data() + i * stride_; }
    double& at(std::size_t i, std::size_t j) noexcept { return data_[i * stride_ + j]; }
    double at(std::size_t i, std::size_t j) const noexcept { return data_[i * stride_ + j]; }
    double& rhs(std::size_t i) noexcept { return data_[i * stride_ + cols_]; }
    double rhs(std::size_t i) const noexcept { return data_[i * stride_ + cols_]; }

    /// Reduced costs; the last slot holds minus the objective value.
    std::vector<double>& obj() noexcept { return obj_; }
    std::vector<std::size_t>& basis() noexcept { return basis_; }
    const std::vector<std::size_t>& basis() const noexcept { return basis_; }

    void negate_column(std::size_t j) {
        for (std::size_t i = 0; i < rows_; ++i) {
            at(i, j) = -at(i, j);
        }
        obj_[j] = -obj_[j];
    }

    /// Rebuilds the reduced-cost row for the given column costs.
    void price(const std::vector<double>& cost) {
        for (std::size_t j = 0; j < cols_; ++j) {
            obj_[j] = cost[j];
        }
        obj_[cols_] = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) {
                continue;
            }
            const double* r = row(i);
            for (std::size_t j = 0; j <= cols_; ++j) {
                obj_[j] -= cb * r[j];
            }
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        double* pr = row(r);
        const double inv = 1.0 / pr[c];
        nonzeros_.clear();
        for (std::size_t k = 0; k < stride_; ++k) {
            if (pr[k] != 0.0) {
                pr[k] *= inv;
                nonzeros_.push_back(k);
            }
        }
        pr[c] = 1.0;
        const bool sparse = nonzeros_.size() * 3 < stride_;
        auto eliminate = [&](double* target) {
            const double f = target[c];
            if (f == 0.0) {
                return;
            }
            if (sparse) {
                for (const auto k : nonzeros_) {
                    target[k] -= f * pr[k];
                }
            } else {
                for (std::size_t k = 0; k < stride_; ++k) {
                    target[k] -= f * pr[k];
                }
            }
            target[c] = 0.0;
        };
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i != r) {
                eliminate(row(i));
            }
        }
        eliminate(obj_.data());
        basis_[r] = c;
    }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t stride_;
    std::vector<double> data_;
    std::vector<double> obj_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> nonzeros_;
};

enum class PhaseResult { Optimal, Unbounded };

struct ColumnInfo {
    std::vector<char> can_enter;
    std::vector<char> is_free;
    std::vector<char> flipped;
};

class SimplexRun {
  public:
    /// bounded_below: the phase objective cannot decrease without limit (phase one),
    /// so a column without a leaving row is roundoff rather than a ray.
    SimplexRun(Tableau& tab, ColumnInfo& cols, std::vector<double>& cost, const SimplexOptions& opt,
               std::size_t& iterations, bool bounded_below)
        : tab_(tab), cols_(cols), cost_(cost), opt_(opt), iterations_(iterations), bounded_below_(bounded_below) {}

    /// Pivots to optimality or an unbounded column; on Unbounded, entering() names the column.
    PhaseResult run() {
        const std::size_t m = tab_.rows();
        const std::size_t n = tab_.cols();
        const auto trigger = static_cast<std::size_t>(opt_.bland_trigger * static_cast<double>(m + n));
        const std::size_t cap = 50 * (m + n) + 1000;
        std::size_t degenerate_run = 0;
        bool bland = false;
        is_basic_.assign(n, 0);
        for (const auto b : tab_.basis()) {
            is_basic_[b] = 1;
        }
        skipped_.assign(n, 0);
        bool any_skipped = false;

        for (std::size_t step = 0;; ++step) {
            if (step > cap) {
                throw NumericalError("simplex exceeded its iteration cap (" + std::to_string(cap) + ")");
            }
            const auto enter = choose_entering(bland);
            if (enter == npos) {
                return PhaseResult::Optimal;
            }
            if (tab_.obj()[enter] > 0.0) {
                // Free column entering downward: substitute y -> -y.
                tab_.negate_column(enter);
                cols_.flipped[enter] ^= 1;
                cost_[enter] = -cost_[enter];
            }
            const auto leave = choose_leaving(enter, bland);
            if (leave == npos) {
                if (bounded_below_) {
                    // Roundoff-level column: set it aside until the next pivot.
                    skipped_[enter] = 1;
                    any_skipped = true;
                    continue;
                }
                entering_ = enter;
                return PhaseResult::Unbounded;
            }
            const double theta = std::max(tab_.rhs(leave), 0.0) / tab_.at(leave, enter);
            if (theta <= 1e-12) {
                if (++degenerate_run > trigger) {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
            is_basic_[tab_.basis()[leave]] = 0;
            tab_.pivot(leave, enter);
            is_basic_[enter] = 1;
            ++iterations_;
            if (any_skipped) {
                std::fill(skipped_.begin(), skipped_.end(), 0);
                any_skipped = false;
            }
        }
    }

    std::size_t entering() const noexcept { return entering_; }

  private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t choose_entering(bool bland) const {
        const auto& d = tab_.obj();
        const double tol = opt_.pivot_tolerance;
        std::size_t best = npos;
        double best_score = 0.0;
        for (std::size_t j = 0; j < tab_.cols(); ++j) {
            if (is_basic_[j] || !cols_.can_enter[j] || skipped_[j]) {
                continue;
            }
            const double score = cols_.is_free[j] ? std::abs(d[j]) : -d[j];
            if (score <= tol) {
                continue;
            }
            if (bland) {
                return j;
            }
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    std::size_t choose_leaving(std::size_t enter, bool bland) const {
        const double tol = opt_.pivot_tolerance;
        const std::size_t m = tab_.rows();
        if (bland) {
            double min_ratio = kInf;
            for (std::size_t i = 0; i < m; ++i) {
                const double a = tab_.at(i, enter);
                if (a > tol && !cols_.is_free[tab_.basis()[i]]) {
                    min_ratio = std::min(min_ratio, std::max(tab_.rhs(i), 0.0) / a);
                }
            }
            if (min_ratio == kInf) {
                return npos;
            }
            const double cutoff = min_ratio + 1e-12 * (1.0 + min_ratio);
            std::size_t best = npos;
            for (std::size_t i = 0; i < m; ++i) {
                const double a = tab_.at(i, enter);
                if (a <= tol || cols_.is_free[tab_.basis()[i]]) {
                    continue;
                }
                if (std::max(tab_.rhs(i), 0.0) / a <= cutoff &&
                    (best == npos || tab_.basis()[i] < tab_.basis()[best])) {
                    best = i;
                }
            }
            return best;
        }
        // Two-pass ratio test: bound the step with a small feasibility
        // allowance, then take the largest pivot among rows inside the bound.
        double bound = kInf;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = tab_.at(i, enter);
            if (a <= tol || cols_.is_free[tab_.basis()[i]]) {
                continue;
            }
            bound = std::min(bound, (std::max(tab_.rhs(i), 0.0) + opt_.pivot_tolerance) / a);
        }
        if (bound == kInf) {
            return npos;
        }
        std::size_t best = npos;
        double best_a = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = tab_.at(i, enter);
            if (a <= tol || cols_.is_free[tab_.basis()[i]]) {
                continue;
            }
            if (std::max(tab_.rhs(i), 0.0) / a <= bound && a > best_a) {
                best_a = a;
                best = i;
            }
        }
        return best;
    }

    Tableau& tab_;
    ColumnInfo& cols_;
    std::vector<double>& cost_;
    const SimplexOptions& opt_;
    std::size_t& iterations_;
    bool bounded_below_;
    std::vector<char> is_basic_;
    std::vector<char> skipped_;
    std::size_t entering_ = npos;
};

}  // namespace

LpOutcome solve(const LinearProgram& lp, const SimplexOptions& options) {
    lp.validate();
    const std::size_t n = lp.n_variables();
    const std::size_t m0 = lp.n_constraints();

    // Variable transformation and box rows.
    VariableMap vars{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), std::vector<char>(n, 0)};
    struct BoxRow {
        std::size_t var;
        double coefficient;
        double rhs;
    };
    std::vector<BoxRow> box_rows;
    for (std::size_t j = 0; j < n; ++j) {
        const double l = lp.lower(static_cast<Eigen::Index>(j));
        const double u = lp.upper(static_cast<Eigen::Index>(j));
        const bool lf = std::isfinite(l);
        const bool uf = std::isfinite(u);
        if (!lf && !uf) {
            vars.free[j] = 1;
        } else if (lf && uf && l < 0.0 && u > 0.0) {
            vars.free[j] = 1;
            box_rows.push_back({j, 1.0, u});
            box_rows.push_back({j, -1.0, -l});
        } else if (lf) {
            vars.shift[j] = l;
            if (uf) {
                box_rows.push_back({j, 1.0, u - l});
            }
        } else {
            vars.shift[j] = u;
            vars.sign[j] = -1.0;
        }
    }

    const std::size_t m = m0 + box_rows.size();
    std::vector<double> a(m * n, 0.0);
    std::vector<double> b(m, 0.0);
    std::vector<Relation> rel(m, Relation::LessEqual);
    for (std::size_t i = 0; i < m0; ++i) {
        double shifted = lp.rhs(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < n; ++j) {
            const double aij = lp.constraints(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            a[i * n + j] = aij * vars.sign[j];
            shifted -= aij * vars.shift[j];
        }
        b[i] = shifted;
        rel[i] = lp.relations[i];
    }
    for (std::size_t k = 0; k < box_rows.size(); ++k) {
        const auto& br = box_rows[k];
        a[(m0 + k) * n + br.var] = br.coefficient;
        b[m0 + k] = br.rhs;
    }

    // Power-of-two equilibration: rows first, then columns.
    std::vector<double> row_scale(m, 1.0);
    std::vector<double> col_scale(n, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        double mx = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            mx = std::max(mx, std::abs(a[i * n + j]));
        }
        row_scale[i] = power_of_two_reciprocal(mx);
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] *= row_scale[i];
        }
        b[i] *= row_scale[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        double mx = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            mx = std::max(mx, std::abs(a[i * n + j]));
        }
        col_scale[j] = power_of_two_reciprocal(mx);
        for (std::size_t i = 0; i < m; ++i) {
            a[i * n + j] *= col_scale[j];
        }
    }

    // Nonnegative right-hand sides; zero-rhs GE rows become LE rows so their slack starts basic.
    std::vector<double> row_sign(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        const bool flip = b[i] < 0.0 || (b[i] == 0.0 && rel[i] == Relation::GreaterEqual);
        if (!flip) {
            continue;
        }
        row_sign[i] = -1.0;
        b[i] = -b[i];
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] = -a[i * n + j];
        }
        if (rel[i] == Relation::LessEqual) {
            rel[i] = Relation::GreaterEqual;
        } else if (rel[i] == Relation::GreaterEqual) {
            rel[i] = Relation::LessEqual;
        }
    }

    // Column layout: structural | slack or surplus | artificial.
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        n_slack += rel[i] != Relation::Equal;
        n_art += rel[i] != Relation::LessEqual;
    }
    const std::size_t n_cols = n + n_slack + n_art;
    Tableau tab(m, n_cols);
    ColumnInfo cols{std::vector<char>(n_cols, 1), std::vector<char>(n_cols, 0), std::vector<char>(n_cols, 0)};
    std::vector<std::size_t> unit_col(m, 0);
    {
        std::size_t s = n;
        std::size_t art = n + n_slack;
        for (std::size_t i = 0; i < m; ++i) {
            double* r = tab.row(i);
            std::copy(a.begin() + static_cast<std::ptrdiff_t>(i * n),
                      a.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), r);
            tab.rhs(i) = b[i];
            if (rel[i] == Relation::LessEqual) {
                r[s] = 1.0;
                unit_col[i] = s;
                tab.basis()[i] = s++;
            } else {
                if (rel[i] == Relation::GreaterEqual) {
                    r[s++] = -1.0;
                }
                r[art] = 1.0;
                unit_col[i] = art;
                tab.basis()[i] = art;
                cols.can_enter[art] = 0;
                ++art;
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        cols.is_free[j] = vars.free[j];
    }

    LpOutcome out;
    std::vector<double> cost(n_cols, 0.0);

    if (n_art > 0) {
        for (std::size_t j = n + n_slack; j < n_cols; ++j) {
            cost[j] = 1.0;
        }
        tab.price(cost);
        SimplexRun phase_one(tab, cols, cost, options, out.iterations, true);
        if (phase_one.run() == PhaseResult::Unbounded) {
            throw NumericalError("phase one reported an unbounded direction");
        }
        double bmax = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            bmax = std::max(bmax, b[i]);
        }
        if (-tab.obj()[n_cols] > options.feasibility_tolerance * bmax) {
            out.status = LpStatus::Infeasible;
            return out;
        }
        // Pivot artificials still basic at zero level out of the basis where the row allows it.
        std::vector<char> basic(n_cols, 0);
        for (const auto bc : tab.basis()) {
            basic[bc] = 1;
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis()[i] < n + n_slack) {
                continue;
            }
            std::size_t best = n_cols;
            double best_a = options.pivot_tolerance;
            for (std::size_t j = 0; j < n + n_slack; ++j) {
                if (!basic[j] && std::abs(tab.at(i, j)) > best_a) {
                    best_a = std::abs(tab.at(i, j));
                    best = j;
                }
            }
            if (best < n_cols) {
                basic[tab.basis()[i]] = 0;
                basic[best] = 1;
                tab.pivot(i, best);
                ++out.iterations;
            }
        }
        std::fill(cost.begin() + static_cast<std::ptrdiff_t>(n + n_slack), cost.end(), 0.0);
    }

    for (std::size_t j = 0; j < n; ++j) {
        const double cj = lp.objective(static_cast<Eigen::Index>(j)) * vars.sign[j] * col_scale[j];
        cost[j] = cols.flipped[j] ? -cj : cj;
    }
    tab.price(cost);
    SimplexRun phase_two(tab, cols, cost, options, out.iterations, false);
    const auto result = phase_two.run();

    auto structural_to_x = [&](const std::vector<double>& y_scaled, bool with_shift) {
        Vector x(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            const double y = y_scaled[j] * (cols.flipped[j] ? -1.0 : 1.0) * col_scale[j];
            x(static_cast<Eigen::Index>(j)) = (with_shift ? vars.shift[j] : 0.0) + vars.sign[j] * y;
        }
        return x;
    };

    if (result == PhaseResult::Unbounded) {
        const auto enter = phase_two.entering();
        std::vector<double> dir(n_cols, 0.0);
        dir[enter] = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            dir[tab.basis()[i]] = -tab.at(i, enter);
        }
        dir.resize(n);
        Vector ray = structural_to_x(dir, false);
        const double norm = ray.lpNorm<Eigen::Infinity>();
        if (!(norm > 0.0)) {
            throw NumericalError("unbounded column produced a zero ray");
        }
        out.status = LpStatus::Unbounded;
        out.ray = ray / norm;
        return out;
    }

    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis()[i] < n) {
            y[tab.basis()[i]] = tab.rhs(i);
        }
    }
    out.status = LpStatus::Optimal;
    out.solution = structural_to_x(y, true);
    out.objective_value = lp.objective.dot(out.solution);
    out.duals.resize(static_cast<Eigen::Index>(m0));
    for (std::size_t i = 0; i < m0; ++i) {
        out.duals(static_cast<Eigen::Index>(i)) = -tab.obj()[unit_col[i]] * row_sign[i] * row_scale[i];
    }
    return out;
}

namespace {

double row_activity_scale(const LinearProgram& lp, Eigen::Index i, const Vector& x) {
    double s = std::max(1.0, std::abs(lp.rhs(i)));
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        s = std::max(s, std::abs(lp.constraints(i, j) * x(j)));
    }
    return s;
}

bool relation_holds(Relation rel, double lhs, double rhs, double tol) {
    switch (rel) {
        case Relation::LessEqual: return lhs <= rhs + tol;
        case Relation::GreaterEqual: return lhs >= rhs - tol;
        case Relation::Equal: return std::abs(lhs - rhs) <= tol;
    }
    return false;
}

}  // namespace

bool verify_certificate(const LinearProgram& lp, const LpOutcome& outcome) {
    lp.validate();
    const auto n = static_cast<Eigen::Index>(lp.n_variables());
    const auto m = static_cast<Eigen::Index>(lp.n_constraints());
    switch (outcome.status) {
        case LpStatus::Infeasible:
            if (outcome.solution.size() != 0 || outcome.ray.size() != 0) {
                throw DomainError("malformed outcome: infeasible status with a solution attached");
            }
            return true;
        case LpStatus::Optimal: {
            const Vector& x = outcome.solution;
            if (x.size() != n || !x.allFinite()) {
                return false;
            }
            constexpr double tol = 1e-7;
            for (Eigen::Index i = 0; i < m; ++i) {
                const double lhs = lp.constraints.row(i).dot(x);
                if (!relation_holds(lp.relations[static_cast<std::size_t>(i)], lhs, lp.rhs(i),
                                    tol * row_activity_scale(lp, i, x))) {
                    return false;
                }
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                if (x(j) < lp.lower(j) - tol * std::max(1.0, std::abs(lp.lower(j)))) {
                    return false;
                }
                if (x(j) > lp.upper(j) + tol * std::max(1.0, std::abs(lp.upper(j)))) {
                    return false;
                }
            }
            const double value = lp.objective.dot(x);
            return std::abs(value - outcome.objective_value) <= tol * std::max(1.0, std::abs(value));
        }
        case LpStatus::Unbounded: {
            if (outcome.ray.size() != n || !outcome.ray.allFinite()) {
                return false;
            }
            const double norm = outcome.ray.lpNorm<Eigen::Infinity>();
            if (!(norm > 0.0)) {
                return false;
            }
            const Vector r = outcome.ray / norm;
            constexpr double tol = 1e-9;
            for (Eigen::Index i = 0; i < m; ++i) {
                const double scale = std::max(1.0, lp.constraints.row(i).lpNorm<Eigen::Infinity>());
                if (!relation_holds(lp.relations[static_cast<std::size_t>(i)], lp.constraints.row(i).dot(r),
                                    0.0, tol * scale)) {
                    return false;
                }
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                if (std::isfinite(lp.lower(j)) && r(j) < -tol) {
                    return false;
                }
                if (std::isfinite(lp.upper(j)) && r(j) > tol) {
                    return false;
                }
            }
            return lp.objective.dot(r) < -tol;
        }
    }
    return false;
}

bool verify_optimality(const LinearProgram& lp, const LpOutcome& outcome, double tol) {
    if (outcome.status != LpStatus::Optimal || !verify_certificate(lp, outcome)) {
        return false;
    }
    const auto n = static_cast<Eigen::Index>(lp.n_variables());
    const auto m = static_cast<Eigen::Index>(lp.n_constraints());
    const Vector& x = outcome.solution;
    const Vector& y = outcome.duals;
    if (y.size() != m) {
        return false;
    }
    const double cscale = std::max(1.0, lp.objective.lpNorm<Eigen::Infinity>());
    const double yscale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto rel = lp.relations[static_cast<std::size_t>(i)];
        if (rel == Relation::GreaterEqual && y(i) < -tol * yscale) {
            return false;
        }
        if (rel == Relation::LessEqual && y(i) > tol * yscale) {
            return false;
        }
        const double slack = lp.constraints.row(i).dot(x) - lp.rhs(i);
        if (std::abs(y(i) * slack) > tol * yscale * row_activity_scale(lp, i, x)) {
            return false;
        }
    }
    const Vector reduced = lp.objective - lp.constraints.transpose() * y;
    const double rtol = tol * std::max(cscale, yscale * std::max(1.0, lp.constraints.lpNorm<Eigen::Infinity>()));
    for (Eigen::Index j = 0; j < n; ++j) {
        const double xs = std::max(1.0, std::abs(x(j)));
        const bool at_lower = std::isfinite(lp.lower(j)) && x(j) - lp.lower(j) <= 1e-7 * xs;
        const bool at_upper = std::isfinite(lp.upper(j)) && lp.upper(j) - x(j) <= 1e-7 * xs;
        if (at_lower && at_upper) {
            continue;
        }
        if (at_lower) {
            if (reduced(j) < -rtol) {
                return false;
            }
        } else if (at_upper) {
            if (reduced(j) > rtol) {
                return false;
            }
        } else if (std::abs(reduced(j)) > rtol) {
            return false;
        }
    }
    return true;
}

void dump_lp(std::ostream& out, const LinearProgram& lp) {
    const auto n = static_cast<Eigen::Index>(lp.n_variables());
    out << "min";
    for (Eigen::Index j = 0; j < n; ++j) {
        out << ' ' << lp.objective(j);
    }
    out << '\n';
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(lp.n_constraints()); ++i) {
        out << "row " << i << ':';
        for (Eigen::Index j = 0; j < n; ++j) {
            out << ' ' << lp.constraints(i, j);
        }
        switch (lp.relations[static_cast<std::size_t>(i)]) {
            case Relation::LessEqual: out << " <= "; break;
            case Relation::GreaterEqual: out << " >= "; break;
            case Relation::Equal: out << " == "; break;
        }
        out << lp.rhs(i) << '\n';
    }
    out << "bounds:";
    for (Eigen::Index j = 0; j < n; ++j) {
        out << " [" << lp.lower(j) << ',' << lp.upper(j) << ']';
    }
    out << '\n';
}

}  // namespace eslab
