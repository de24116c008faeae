#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace capexp::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : std::uint8_t { Le, Eq, Ge };

char sense_letter(RowSense sense);

struct Term {
    int col;
    double coef;
};

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse column copy of the constraint matrix.
struct CscMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> start;  // size cols+1
    std::vector<int> index;
    std::vector<double> value;
};

/// Sparse minimization LP with optional binary marks. Column and row names
/// are unique; duplicate triplets are summed when the matrix is compressed.
class LpModel {
public:
    int add_column(std::string name, double lower, double upper, double cost = 0.0,
                   bool binary = false);
    int add_row(std::string name, RowSense sense, double rhs);
    int add_row(std::string name, std::span<const Term> terms, RowSense sense, double rhs);

    void add_coefficient(int row, int col, double value);
    void set_cost(int col, double cost) { cost_.at(col) = cost; }
    void add_cost(int col, double cost) { cost_.at(col) += cost; }
    void set_objective_constant(double c) { objective_constant_ = c; }
    void add_objective_constant(double c) { objective_constant_ += c; }
    void set_bounds(int col, double lower, double upper);
    void set_binary(int col, bool binary);
    void set_rhs(int row, double rhs) { rhs_.at(row) = rhs; }

    int num_cols() const { return static_cast<int>(lower_.size()); }
    int num_rows() const { return static_cast<int>(rhs_.size()); }
    int num_binaries() const;
    std::size_t num_nonzeros() const { return triplets_.size(); }

    double col_lower(int j) const { return lower_[j]; }
    double col_upper(int j) const { return upper_[j]; }
    double cost(int j) const { return cost_[j]; }
    bool is_binary(int j) const { return binary_[j] != 0; }
    double objective_constant() const { return objective_constant_; }
    RowSense row_sense(int i) const { return sense_[i]; }
    double row_rhs(int i) const { return rhs_[i]; }

    const std::string& col_name(int j) const { return col_names_[j]; }
    const std::string& row_name(int i) const { return row_names_[i]; }
    std::optional<int> find_col(std::string_view name) const;
    std::optional<int> find_row(std::string_view name) const;

    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    const std::vector<double>& costs() const { return cost_; }
    const std::vector<Triplet>& triplets() const { return triplets_; }

    /// Column-major matrix with duplicates merged and explicit zeros dropped.
    CscMatrix column_matrix() const;
    /// Row-major layout of the same matrix (as a CSC of the transpose).
    CscMatrix row_matrix() const;

    double objective_value(std::span<const double> x) const;
    std::vector<double> row_activity(std::span<const double> x) const;

    /// Throws Error(ValidationError) naming the first violated invariant.
    void validate() const;

private:
    std::vector<double> lower_, upper_, cost_;
    std::vector<std::uint8_t> binary_;
    std::vector<std::string> col_names_;
    std::vector<RowSense> sense_;
    std::vector<double> rhs_;
    std::vector<std::string> row_names_;
    std::vector<Triplet> triplets_;
    double objective_constant_ = 0.0;
    std::unordered_map<std::string, int> col_index_, row_index_;
};

enum class SolveStatus : std::uint8_t {
    Optimal,
    Feasible,
    Infeasible,
    Unbounded,
    IterationLimit,
    NodeLimit,
};

std::string_view to_string(SolveStatus status);

struct SolverStats {
    long iterations = 0;
    long nodes = 0;
    double seconds = 0.0;
    double best_bound = -kInf;
};

struct Solution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> primal;
    std::vector<double> row_activity;
    std::vector<double> row_dual;      // empty when not available
    std::vector<double> reduced_cost;  // empty when not available
    double objective = 0.0;
    SolverStats stats;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Largest violation of column bounds and row senses, measured relative to
/// max(1, |rhs|) for rows and max(1, |bound|) for columns.
struct Residual {
    double max_violation = 0.0;
    int worst_row = -1;  // -1 when the worst violation is a bound
    int worst_col = -1;
};

Residual primal_residual(const LpModel& model, std::span<const double> x);

/// Strong-duality certificate evaluated from (x, y) on the original model.
struct DualityCertificate {
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double gap = 0.0;                  // |primal - dual| / max(1, |primal|)
    double max_dual_infeasibility = 0.0;
};

DualityCertificate check_duality(const LpModel& model, const Solution& solution);

}  // namespace capexp::lp
