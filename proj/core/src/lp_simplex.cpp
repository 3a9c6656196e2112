#include "fri/lp.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string_view>
#include <cmath>
#include <fstream>
#include <iomanip>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace fri::lp {

std::string to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

std::string to_string(Relation r) {
    switch (r) {
        case Relation::LessEq: return "<=";
        case Relation::Equal: return "=";
        case Relation::GreaterEq: return ">=";
    }
    return "?";
}

void LpProblem::validate() const {
    const int n = num_vars();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("lp: bounds length != objective length");
    if (rhs.size() != num_rows() || relations.size() != rows.size())
        throw std::invalid_argument("lp: row metadata length mismatch");
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(objective[j]))
            throw std::invalid_argument("lp: non-finite objective coefficient");
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
            throw std::invalid_argument("lp: invalid bounds for variable " +
                                        std::to_string(j));
    }
    for (int r = 0; r < num_rows(); ++r) {
        if (!std::isfinite(rhs[r]))
            throw std::invalid_argument("lp: non-finite right-hand side");
        const SparseRow& row = rows[r];
        int prev = -1;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row.index[k] <= prev || row.index[k] >= n)
                throw std::invalid_argument("lp: bad column index in row " +
                                            std::to_string(r));
            prev = row.index[k];
            if (!std::isfinite(row.value[k]))
                throw std::invalid_argument("lp: non-finite coefficient");
        }
    }
}

Eigen::VectorXd LpProblem::dense_row(int r) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(num_vars());
    const SparseRow& row = rows.at(r);
    for (std::size_t k = 0; k < row.size(); ++k) out[row.index[k]] = row.value[k];
    return out;
}

double max_infeasibility(const LpProblem& problem, const Eigen::VectorXd& x) {
    double worst = 0.0;
    for (int j = 0; j < problem.num_vars(); ++j) {
        worst = std::max(worst, problem.lower[j] - x[j]);
        worst = std::max(worst, x[j] - problem.upper[j]);
    }
    for (int r = 0; r < problem.num_rows(); ++r) {
        const SparseRow& row = problem.rows[r];
        double lhs = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k)
            lhs += row.value[k] * x[row.index[k]];
        const double resid = lhs - problem.rhs[r];
        switch (problem.relations[r]) {
            case Relation::LessEq: worst = std::max(worst, resid); break;
            case Relation::GreaterEq: worst = std::max(worst, -resid); break;
            case Relation::Equal: worst = std::max(worst, std::abs(resid)); break;
        }
    }
    return worst;
}

namespace {

// Column-major copy of [A | I] where I holds one logical column per row.
struct Columns {
    std::vector<std::vector<std::pair<int, double>>> cols;
    int n_struct = 0;
    int n_total = 0;

    explicit Columns(const LpProblem& p) {
        n_struct = p.num_vars();
        const int m = p.num_rows();
        n_total = n_struct + m;
        cols.resize(n_total);
        for (int r = 0; r < m; ++r) {
            const SparseRow& row = p.rows[r];
            for (std::size_t k = 0; k < row.size(); ++k)
                cols[row.index[k]].emplace_back(r, row.value[k]);
            cols[n_struct + r].emplace_back(r, 1.0);
        }
    }

    double dot(int j, const Eigen::VectorXd& y) const {
        double s = 0.0;
        for (const auto& [r, v] : cols[j]) s += v * y[r];
        return s;
    }

    void scatter(int j, Eigen::VectorXd& out) const {
        out.setZero();
        for (const auto& [r, v] : cols[j]) out[r] = v;
    }
};

enum class VarState : std::uint8_t { AtLower, AtUpper, Free, Basic };

struct Eta {
    int slot;
    Eigen::VectorXd col;
};

class Simplex {
  public:
    Simplex(const LpProblem& p, const SolverTolerances& tol)
        : p_(p), tol_(tol), A_(p), m_(p.num_rows()), n_(A_.n_total) {
        lo_.resize(n_);
        up_.resize(n_);
        for (int j = 0; j < p.num_vars(); ++j) {
            lo_[j] = p.lower[j];
            up_[j] = p.upper[j];
        }
        for (int r = 0; r < m_; ++r) {
            const int j = p.num_vars() + r;
            switch (p.relations[r]) {
                case Relation::LessEq: lo_[j] = 0.0; up_[j] = kInf; break;
                case Relation::GreaterEq: lo_[j] = -kInf; up_[j] = 0.0; break;
                case Relation::Equal: lo_[j] = 0.0; up_[j] = 0.0; break;
            }
        }
        cost_ = Eigen::VectorXd::Zero(n_);
        cost_.head(p.num_vars()) = p.objective;
    }

    LpSolution run() {
        LpSolution sol;
        init_basis();
        const int limit = tol_.pivot_limit_factor * (m_ + n_);

        // Residual drift can leave the final point slightly infeasible; one
        // further phase-1/2 pass from the refreshed basis cleans it up.
        for (int attempt = 0; attempt < 2; ++attempt) {
            Status st = iterate(/*phase=*/1, limit);
            if (st != Status::Optimal) {
                sol.status = st;
                sol.iterations = iter_;
                return sol;
            }
            refactor();
            if (infeasibility_sum() > tol_.feasibility * scale_) {
                sol.status = Status::Infeasible;
                sol.iterations = iter_;
                return sol;
            }
            st = iterate(/*phase=*/2, limit);
            if (st != Status::Optimal) {
                sol.status = st;
                sol.iterations = iter_;
                return sol;
            }
            refactor();

            Eigen::VectorXd point = x_.head(p_.num_vars());
            if (max_infeasibility(p_, point) > tol_.feasibility * scale_) {
                if (attempt == 0) continue;
                sol.status = Status::NumericalFailure;
                sol.iterations = iter_;
                return sol;
            }
            sol.status = Status::Optimal;
            sol.point = std::move(point);
            sol.objective_value = p_.objective.dot(x_.head(p_.num_vars()));
            sol.iterations = iter_;
            return sol;
        }
        return sol;  // unreachable
    }

  private:
    const LpProblem& p_;
    SolverTolerances tol_;
    Columns A_;
    int m_;
    int n_;
    Eigen::VectorXd lo_, up_, cost_;
    Eigen::VectorXd x_;
    std::vector<int> basis_;
    std::vector<VarState> state_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    std::vector<Eta> etas_;
    int iter_ = 0;
    double scale_ = 1.0;

    static constexpr int kRefactorEvery = 64;
    static constexpr double kDualTol = 1e-9;

    void init_basis() {
        basis_.resize(m_);
        state_.assign(n_, VarState::AtLower);
        x_ = Eigen::VectorXd::Zero(n_);
        for (int j = 0; j < n_; ++j) {
            if (std::isfinite(lo_[j])) {
                state_[j] = VarState::AtLower;
                x_[j] = lo_[j];
            } else if (std::isfinite(up_[j])) {
                state_[j] = VarState::AtUpper;
                x_[j] = up_[j];
            } else {
                state_[j] = VarState::Free;
                x_[j] = 0.0;
            }
        }
        for (int r = 0; r < m_; ++r) {
            const int j = p_.num_vars() + r;
            basis_[r] = j;
            state_[j] = VarState::Basic;
        }
        scale_ = 1.0;
        for (int r = 0; r < m_; ++r)
            scale_ = std::max(scale_, std::abs(p_.rhs[r]));
        refactor();
    }

    void refactor() {
        Eigen::SparseMatrix<double> B(m_, m_);
        std::vector<Eigen::Triplet<double>> trip;
        for (int r = 0; r < m_; ++r)
            for (const auto& [row, v] : A_.cols[basis_[r]])
                trip.emplace_back(row, r, v);
        B.setFromTriplets(trip.begin(), trip.end());
        lu_.compute(B);
        etas_.clear();
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("lp: singular basis");
        recompute_basics();
    }

    void recompute_basics() {
        Eigen::VectorXd b = p_.rhs;
        for (int j = 0; j < n_; ++j) {
            if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
            for (const auto& [r, v] : A_.cols[j]) b[r] -= v * x_[j];
        }
        Eigen::VectorXd xb = ftran(b);
        for (int r = 0; r < m_; ++r) x_[basis_[r]] = xb[r];
    }

    Eigen::VectorXd ftran(const Eigen::VectorXd& v) {
        Eigen::VectorXd z = lu_.solve(v);
        for (const Eta& e : etas_) {
            const double t = z[e.slot] / e.col[e.slot];
            z -= t * e.col;
            z[e.slot] = t;
        }
        return z;
    }

    Eigen::VectorXd btran(Eigen::VectorXd g) {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            const Eta& e = *it;
            double s = g[e.slot];
            for (int r = 0; r < m_; ++r)
                if (r != e.slot) s -= g[r] * e.col[r];
            g[e.slot] = s / e.col[e.slot];
        }
        return lu_.adjoint().solve(g);
    }

    double infeas_of(int j) const {
        if (x_[j] < lo_[j]) return lo_[j] - x_[j];
        if (x_[j] > up_[j]) return x_[j] - up_[j];
        return 0.0;
    }

    double infeasibility_sum() const {
        double s = 0.0;
        for (int r = 0; r < m_; ++r) s += infeas_of(basis_[r]);
        return s;
    }

    double phase_objective(int phase) const {
        if (phase == 1) return infeasibility_sum();
        double s = 0.0;
        for (int j = 0; j < p_.num_vars(); ++j) s += cost_[j] * x_[j];
        return s;
    }

    // Phase-1 costs: +1 above upper, -1 below lower, else the true cost
    // scaled to zero (pure infeasibility objective).
    Eigen::VectorXd basic_costs(int phase) const {
        Eigen::VectorXd cb(m_);
        const double ftol = tol_.feasibility * scale_;
        for (int r = 0; r < m_; ++r) {
            const int j = basis_[r];
            if (phase == 1) {
                if (x_[j] > up_[j] + ftol) cb[r] = 1.0;
                else if (x_[j] < lo_[j] - ftol) cb[r] = -1.0;
                else cb[r] = 0.0;
            } else {
                cb[r] = cost_[j];
            }
        }
        return cb;
    }

    Status iterate(int phase, int limit) {
        int stall = 0;
        bool bland = false;
        double best = phase_objective(phase);
        while (true) {
            if (iter_ >= limit) return Status::NumericalFailure;
            if (phase == 1 && infeasibility_sum() <= tol_.feasibility * scale_)
                return Status::Optimal;

            const Eigen::VectorXd y = btran(basic_costs(phase));

            // Pricing.
            int enter = -1;
            double enter_score = 0.0;
            int enter_dir = 0;
            for (int j = 0; j < n_; ++j) {
                const VarState st = state_[j];
                if (st == VarState::Basic) continue;
                if (lo_[j] == up_[j]) continue;  // fixed, never enters
                const double cj = (phase == 1) ? 0.0 : cost_[j];
                const double dj = cj - A_.dot(j, y);
                int dir = 0;
                if (st == VarState::AtLower && dj < -kDualTol) dir = +1;
                else if (st == VarState::AtUpper && dj > kDualTol) dir = -1;
                else if (st == VarState::Free && std::abs(dj) > kDualTol)
                    dir = dj < 0 ? +1 : -1;
                if (dir == 0) continue;
                if (bland) { enter = j; enter_dir = dir; break; }
                const double score = std::abs(dj);
                if (score > enter_score) {
                    enter_score = score;
                    enter = j;
                    enter_dir = dir;
                }
            }
            if (enter < 0) {
                if (phase == 1 && infeasibility_sum() > tol_.feasibility * scale_) {
                    // Clean up numerical drift before declaring infeasible.
                    if (!etas_.empty()) { refactor(); continue; }
                    return Status::Optimal;  // run() re-checks the residual
                }
                if (!etas_.empty()) { refactor(); continue; }
                return Status::Optimal;
            }

            Eigen::VectorXd acol = Eigen::VectorXd::Zero(m_);
            A_.scatter(enter, acol);
            const Eigen::VectorXd d = ftran(acol);

            // Ratio test. x_B(t) = x_B - t * enter_dir * d.
            const double span = up_[enter] - lo_[enter];
            const double ftol = tol_.feasibility * scale_;

            auto slot_limit = [&](int r, double& bnd) -> double {
                const double alpha = enter_dir * d[r];
                if (std::abs(alpha) <= tol_.pivot) return kInf;
                const int jb = basis_[r];
                if (phase == 1 && x_[jb] > up_[jb] + ftol) {
                    if (alpha > 0) { bnd = up_[jb]; return (x_[jb] - up_[jb]) / alpha; }
                    return kInf;
                }
                if (phase == 1 && x_[jb] < lo_[jb] - ftol) {
                    if (alpha < 0) { bnd = lo_[jb]; return (lo_[jb] - x_[jb]) / -alpha; }
                    return kInf;
                }
                if (alpha > 0) {
                    if (!std::isfinite(lo_[jb])) return kInf;
                    bnd = lo_[jb];
                    return std::max((x_[jb] - lo_[jb]) / alpha, 0.0);
                }
                if (!std::isfinite(up_[jb])) return kInf;
                bnd = up_[jb];
                return std::max((up_[jb] - x_[jb]) / -alpha, 0.0);
            };

            double t_min = std::isfinite(span) ? span : kInf;
            for (int r = 0; r < m_; ++r) {
                double bnd;
                t_min = std::min(t_min, slot_limit(r, bnd));
            }

            int leave_slot = -1;
            double leave_bound = 0.0;
            double leave_alpha = 0.0;
            double t_best = t_min;
            if (t_min < kInf) {
                for (int r = 0; r < m_; ++r) {
                    double bnd;
                    const double t = slot_limit(r, bnd);
                    if (t > t_min + 1e-12) continue;
                    const double alpha = enter_dir * d[r];
                    const bool better =
                        leave_slot < 0 ||
                        (bland ? basis_[r] < basis_[leave_slot]
                               : std::abs(alpha) > std::abs(leave_alpha));
                    if (better) {
                        leave_slot = r;
                        leave_bound = bnd;
                        leave_alpha = alpha;
                        t_best = t;
                    }
                }
            }

            if (t_min == kInf) {
                if (phase == 2) return Status::Unbounded;
                return Status::NumericalFailure;
            }

            ++iter_;
            // Apply the step.
            for (int r = 0; r < m_; ++r)
                x_[basis_[r]] -= t_best * enter_dir * d[r];
            if (leave_slot < 0 || (std::isfinite(span) && t_best >= span)) {
                // Bound flip: entering jumps to its opposite bound.
                state_[enter] = enter_dir > 0 ? VarState::AtUpper : VarState::AtLower;
                x_[enter] = enter_dir > 0 ? up_[enter] : lo_[enter];
            } else {
                const int jl = basis_[leave_slot];
                x_[enter] = x_[enter] + enter_dir * t_best;
                x_[jl] = leave_bound;
                state_[jl] = (leave_bound == lo_[jl]) ? VarState::AtLower
                                                      : VarState::AtUpper;
                state_[enter] = VarState::Basic;
                basis_[leave_slot] = enter;
                etas_.push_back({leave_slot, d});
                if (static_cast<int>(etas_.size()) >= kRefactorEvery) refactor();
            }

            const double obj = phase_objective(phase);
            if (obj < best - 1e-12 * (1.0 + std::abs(best))) {
                best = obj;
                stall = 0;
                bland = false;
            } else if (++stall > 60) {
                bland = true;
            }
        }
    }
};

}  // namespace

namespace {
std::atomic<std::uint64_t> g_solves{0};
}

std::uint64_t solve_invocations() { return g_solves.load(); }

LpSolution solve(const LpProblem& problem, const SolverTolerances& tol) {
    const std::uint64_t id =
        g_solves.fetch_add(1, std::memory_order_relaxed) + 1;
    static const bool dump = [] {
        const char* v = std::getenv("FRI_LP_DUMP");
        return v != nullptr && std::string_view(v) == "1";
    }();
    if (dump)
        write_mps(problem, "fri_lp_" + std::to_string(id) + ".mps",
                  "lp_" + std::to_string(id));
    problem.validate();
    try {
        Simplex s(problem, tol);
        return s.run();
    } catch (const std::runtime_error&) {
        LpSolution sol;
        sol.status = Status::NumericalFailure;
        return sol;
    }
}

int BlockLayout::add_block(const std::string& name, int size) {
    if (size < 0) throw std::invalid_argument("block size < 0: " + name);
    if (has(name)) throw std::invalid_argument("duplicate block name: " + name);
    const int off = total_;
    blocks_.emplace_back(name, std::make_pair(off, size));
    total_ += size;
    return off;
}

bool BlockLayout::has(const std::string& name) const {
    for (const auto& b : blocks_)
        if (b.first == name) return true;
    return false;
}

int BlockLayout::offset(const std::string& name) const {
    for (const auto& b : blocks_)
        if (b.first == name) return b.second.first;
    throw std::invalid_argument("unknown block: " + name);
}

int BlockLayout::size(const std::string& name) const {
    for (const auto& b : blocks_)
        if (b.first == name) return b.second.second;
    throw std::invalid_argument("unknown block: " + name);
}

int BlockLayout::col(const std::string& name, int i) const {
    for (const auto& b : blocks_) {
        if (b.first != name) continue;
        if (i < 0 || i >= b.second.second)
            throw std::out_of_range("block index out of range: " + name + "[" +
                                    std::to_string(i) + "]");
        return b.second.first + i;
    }
    throw std::invalid_argument("unknown block: " + name);
}

LpBuilder::LpBuilder(BlockLayout layout) : layout_(std::move(layout)) {
    const int n = layout_.total();
    problem_.objective = Eigen::VectorXd::Zero(n);
    problem_.lower = Eigen::VectorXd::Constant(n, -kInf);
    problem_.upper = Eigen::VectorXd::Constant(n, kInf);
}

void LpBuilder::set_objective(const std::string& block, int i, double coef) {
    problem_.objective[layout_.col(block, i)] = coef;
}

void LpBuilder::set_bounds(const std::string& block, int i, double lo, double up) {
    const int c = layout_.col(block, i);
    problem_.lower[c] = lo;
    problem_.upper[c] = up;
}

void LpBuilder::begin_row(Relation rel, double rhs) {
    problem_.rows.emplace_back();
    problem_.relations.push_back(rel);
    problem_.rhs.conservativeResize(problem_.rhs.size() + 1);
    problem_.rhs[problem_.rhs.size() - 1] = rhs;
}

void LpBuilder::add_term(const std::string& block, int i, double coef) {
    if (problem_.rows.empty()) throw std::logic_error("add_term before begin_row");
    if (coef == 0.0) return;
    problem_.rows.back().push(layout_.col(block, i), coef);
}

LpProblem LpBuilder::build() const {
    LpProblem p = problem_;
    // Rows are assembled block-by-block; enforce sorted column order.
    for (auto& row : p.rows) {
        std::vector<int> order(row.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return row.index[a] < row.index[b]; });
        SparseRow sorted;
        for (int k : order) sorted.push(row.index[k], row.value[k]);
        row = std::move(sorted);
    }
    p.validate();
    return p;
}

void write_mps(const LpProblem& problem, const std::string& path,
               const std::string& name) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    auto field = [](const std::string& s) {
        std::string f = s;
        f.resize(std::max<std::size_t>(f.size(), 8), ' ');
        return f;
    };
    out << "NAME          " << name << "\n";
    out << "ROWS\n N  COST\n";
    for (int r = 0; r < problem.num_rows(); ++r) {
        char rel = 'L';
        if (problem.relations[r] == Relation::Equal) rel = 'E';
        if (problem.relations[r] == Relation::GreaterEq) rel = 'G';
        out << " " << rel << "  R" << r << "\n";
    }
    out << "COLUMNS\n";
    out << std::setprecision(17);
    // Column-major scan.
    std::vector<std::vector<std::pair<int, double>>> cols(problem.num_vars());
    for (int r = 0; r < problem.num_rows(); ++r) {
        const SparseRow& row = problem.rows[r];
        for (std::size_t k = 0; k < row.size(); ++k)
            cols[row.index[k]].emplace_back(r, row.value[k]);
    }
    for (int j = 0; j < problem.num_vars(); ++j) {
        const std::string cn = "X" + std::to_string(j);
        if (problem.objective[j] != 0.0)
            out << "    " << field(cn) << "  " << field("COST") << "  "
                << problem.objective[j] << "\n";
        for (const auto& [r, v] : cols[j])
            out << "    " << field(cn) << "  " << field("R" + std::to_string(r))
                << "  " << v << "\n";
    }
    out << "RHS\n";
    for (int r = 0; r < problem.num_rows(); ++r)
        if (problem.rhs[r] != 0.0)
            out << "    " << field("RHS") << "  " << field("R" + std::to_string(r))
                << "  " << problem.rhs[r] << "\n";
    out << "BOUNDS\n";
    for (int j = 0; j < problem.num_vars(); ++j) {
        const std::string cn = "X" + std::to_string(j);
        const double lo = problem.lower[j], up = problem.upper[j];
        if (lo == 0.0 && up == kInf) continue;  // MPS default
        if (lo == -kInf && up == kInf) {
            out << " FR " << field("BND") << "  " << field(cn) << "\n";
            continue;
        }
        if (lo == -kInf)
            out << " MI " << field("BND") << "  " << field(cn) << "\n";
        else
            out << " LO " << field("BND") << "  " << field(cn) << "  " << lo << "\n";
        if (up != kInf)
            out << " UP " << field("BND") << "  " << field(cn) << "  " << up << "\n";
    }
    out << "ENDATA\n";
}

}  // namespace fri::lp
