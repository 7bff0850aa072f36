#pragma once

#include "eslab/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

namespace eslab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, GreaterEqual, Equal };

/// minimize c'x  subject to  A x (rel) b,  lower <= x <= upper.
///
/// Bounds may be infinite. Entries of A, b and c must be finite.
struct LinearProgram {
    Vector objective;
    Matrix constraints;
    Vector rhs;
    std::vector<Relation> relations;
    Vector lower;
    Vector upper;

    /// n variables, no rows, bounds [0, +inf), zero objective.
    static LinearProgram nonnegative(std::size_t n_variables);
    /// n variables, no rows, free bounds, zero objective.
    static LinearProgram free(std::size_t n_variables);

    std::size_t n_variables() const noexcept { return static_cast<std::size_t>(objective.size()); }
    std::size_t n_constraints() const noexcept { return static_cast<std::size_t>(rhs.size()); }

    /// Appends one constraint row.
    void add_row(const Vector& coefficients, Relation relation, double rhs_value);

    /// Throws DimensionError / DomainError when the pieces disagree or hold non-finite data.
    void validate() const;
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    /// Optimal only.
    Vector solution;
    double objective_value = 0.0;
    /// Optimal only: one multiplier per row (>= 0 for GE rows, <= 0 for LE rows).
    Vector duals;
    /// Unbounded only: recession direction with c'ray < 0, normalized to max-norm 1.
    Vector ray;
    std::size_t iterations = 0;
};

struct SimplexOptions {
    /// Smallest pivot element / reduced cost treated as nonzero.
    double pivot_tolerance = 1e-9;
    /// Phase-one residual above which the program is declared infeasible.
    double feasibility_tolerance = 1e-7;
    /// Consecutive degenerate pivots, as a multiple of (m + n), before Bland's rule engages.
    double bland_trigger = 3.0;
};

/// Two-phase primal simplex on a dense tableau.
///
/// Rows and columns are equilibrated by powers of two before pivoting.
/// Variables with a finite bound are shifted onto it, variables whose box
/// contains zero stay free and get explicit box rows, and free variables
/// enter in either direction and never leave the basis. Pricing is Dantzig's
/// most-negative reduced cost; Bland's smallest-index rule takes over after a
/// run of degenerate pivots. Deterministic for a given input.
LpOutcome solve(const LinearProgram& lp, const SimplexOptions& options = {});

/// Re-checks an outcome against the program by direct multiplication.
///
/// Optimal: every row relation and bound holds within 1e-7 (relative to the
/// row's magnitude) and objective_value equals c'solution within 1e-7.
/// Unbounded: the ray respects every relation and bound homogeneously within
/// 1e-9 and c'ray < -1e-9 at max-norm 1. Infeasible outcomes carry no
/// certificate; one with a solution attached throws DomainError.
bool verify_certificate(const LinearProgram& lp, const LpOutcome& outcome);

/// Optimality via duality for an Optimal outcome: dual signs, reduced-cost
/// signs against active bounds, and complementary slackness, each within tol
/// (relative to the data magnitude).
bool verify_optimality(const LinearProgram& lp, const LpOutcome& outcome, double tol = 1e-6);

/// Human-readable dump for debugging; not an interchange format.
void dump_lp(std::ostream& out, const LinearProgram& lp);

}  // namespace eslab
