#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fri::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEq, Equal, GreaterEq };

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(Status s);
std::string to_string(Relation r);

/// One constraint row, stored sparse. Indices must be strictly increasing.
struct SparseRow {
    std::vector<int> index;
    std::vector<double> value;

    void push(int i, double v) {
        index.push_back(i);
        value.push_back(v);
    }
    std::size_t size() const { return index.size(); }
};

/// Canonical linear program: minimize objective . x subject to row
/// constraints and per-variable bounds (+-inf allowed in bounds only).
struct LpProblem {
    Eigen::VectorXd objective;
    std::vector<SparseRow> rows;
    std::vector<Relation> relations;
    Eigen::VectorXd rhs;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;

    /// Dense row view, mostly for tests and the debug dump.
    Eigen::VectorXd dense_row(int r) const;
};

struct SolverTolerances {
    double feasibility = 1e-8;  // eps_feas
    double optimality = 1e-7;   // eps_opt
    double pivot = 1e-9;        // smallest acceptable pivot magnitude
    // Iteration cap: pivot_limit_factor * (rows + cols).
    int pivot_limit_factor = 50;
};

struct LpSolution {
    Status status = Status::NumericalFailure;
    std::optional<Eigen::VectorXd> point;       // present iff Optimal
    std::optional<double> objective_value;      // present iff Optimal
    int iterations = 0;

    bool optimal() const { return status == Status::Optimal; }
};

/// Deterministic bounded-variable revised simplex. Stateless: concurrent
/// solve() calls on distinct problems are safe.
LpSolution solve(const LpProblem& problem, const SolverTolerances& tol = {});

/// Largest constraint / bound violation of a candidate point.
double max_infeasibility(const LpProblem& problem, const Eigen::VectorXd& x);

/// Process-wide count of solve() invocations; the complexity accounting
/// (LPs per feature, permutation budget) is asserted against this.
std::uint64_t solve_invocations();

/// Fixed-column MPS dump of a problem, one file per call.
void write_mps(const LpProblem& problem, const std::string& path,
               const std::string& name = "FRI_LP");

/// Named-block variable layout used by the model assemblers. Column ranges
/// are handed out in insertion order.
class BlockLayout {
  public:
    int add_block(const std::string& name, int size);
    int offset(const std::string& name) const;
    int size(const std::string& name) const;
    int col(const std::string& name, int i) const;
    int total() const { return total_; }
    bool has(const std::string& name) const;

  private:
    std::vector<std::pair<std::string, std::pair<int, int>>> blocks_;
    int total_ = 0;
};

/// Incremental LP assembler over a BlockLayout.
class LpBuilder {
  public:
    explicit LpBuilder(BlockLayout layout);

    const BlockLayout& layout() const { return layout_; }

    void set_objective(const std::string& block, int i, double coef);
    void set_bounds(const std::string& block, int i, double lo, double up);

    /// Starts a new row; subsequent add_term calls attach to it.
    void begin_row(Relation rel, double rhs);
    void add_term(const std::string& block, int i, double coef);

    LpProblem build() const;

  private:
    BlockLayout layout_;
    LpProblem problem_;
};

}  // namespace fri::lp
