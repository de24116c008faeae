#include "capexp/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "capexp/error.hpp"

namespace capexp::lp {

char sense_letter(RowSense sense)
{
    switch (sense) {
    case RowSense::Le: return 'L';
    case RowSense::Eq: return 'E';
    case RowSense::Ge: return 'G';
    }
    return '?';
}

std::string_view to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::NodeLimit: return "NodeLimit";
    }
    return "Unknown";
}

int LpModel::add_column(std::string name, double lower, double upper, double cost, bool binary)
{
    const int j = num_cols();
    auto [it, inserted] = col_index_.emplace(name, j);
    if (!inserted)
        throw Error(ErrorKind::ValidationError, "duplicate column name '" + name + "'");
    lower_.push_back(lower);
    upper_.push_back(upper);
    cost_.push_back(cost);
    binary_.push_back(binary ? 1 : 0);
    col_names_.push_back(std::move(name));
    return j;
}

int LpModel::add_row(std::string name, RowSense sense, double rhs)
{
    const int i = num_rows();
    auto [it, inserted] = row_index_.emplace(name, i);
    if (!inserted)
        throw Error(ErrorKind::ValidationError, "duplicate row name '" + name + "'");
    sense_.push_back(sense);
    rhs_.push_back(rhs);
    row_names_.push_back(std::move(name));
    return i;
}

int LpModel::add_row(std::string name, std::span<const Term> terms, RowSense sense, double rhs)
{
    const int i = add_row(std::move(name), sense, rhs);
    for (const Term& t : terms)
        add_coefficient(i, t.col, t.coef);
    return i;
}

void LpModel::add_coefficient(int row, int col, double value)
{
    if (row < 0 || row >= num_rows() || col < 0 || col >= num_cols())
        throw Error(ErrorKind::ValidationError,
                    "coefficient (" + std::to_string(row) + "," + std::to_string(col) +
                        ") references an undeclared row or column");
    if (value != 0.0)
        triplets_.push_back({row, col, value});
}

void LpModel::set_bounds(int col, double lower, double upper)
{
    lower_.at(col) = lower;
    upper_.at(col) = upper;
}

void LpModel::set_binary(int col, bool binary) { binary_.at(col) = binary ? 1 : 0; }

int LpModel::num_binaries() const
{
    return static_cast<int>(std::count(binary_.begin(), binary_.end(), std::uint8_t{1}));
}

std::optional<int> LpModel::find_col(std::string_view name) const
{
    auto it = col_index_.find(std::string(name));
    if (it == col_index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<int> LpModel::find_row(std::string_view name) const
{
    auto it = row_index_.find(std::string(name));
    if (it == row_index_.end())
        return std::nullopt;
    return it->second;
}

namespace {

CscMatrix compress(int major, int minor, const std::vector<Triplet>& trips, bool by_col)
{
    CscMatrix m;
    m.cols = major;
    m.rows = minor;
    std::vector<int> order(trips.size());
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int k) {
        const Triplet& t = trips[k];
        return by_col ? std::pair{t.col, t.row} : std::pair{t.row, t.col};
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });

    m.start.assign(major + 1, 0);
    int last_major = -1, last_minor = -1;
    for (int k : order) {
        auto [maj, mn] = key(k);
        if (maj == last_major && mn == last_minor) {
            m.value.back() += trips[k].value;
            continue;
        }
        m.index.push_back(mn);
        m.value.push_back(trips[k].value);
        ++m.start[maj + 1];
        last_major = maj;
        last_minor = mn;
    }
    for (int j = 0; j < major; ++j)
        m.start[j + 1] += m.start[j];

    // Drop entries that cancelled to zero.
    CscMatrix out;
    out.cols = m.cols;
    out.rows = m.rows;
    out.start.assign(major + 1, 0);
    for (int j = 0; j < major; ++j) {
        for (int k = m.start[j]; k < m.start[j + 1]; ++k) {
            if (m.value[k] != 0.0) {
                out.index.push_back(m.index[k]);
                out.value.push_back(m.value[k]);
            }
        }
        out.start[j + 1] = static_cast<int>(out.index.size());
    }
    return out;
}

}  // namespace

CscMatrix LpModel::column_matrix() const { return compress(num_cols(), num_rows(), triplets_, true); }

CscMatrix LpModel::row_matrix() const { return compress(num_rows(), num_cols(), triplets_, false); }

double LpModel::objective_value(std::span<const double> x) const
{
    double obj = objective_constant_;
    for (int j = 0; j < num_cols(); ++j)
        obj += cost_[j] * x[j];
    return obj;
}

std::vector<double> LpModel::row_activity(std::span<const double> x) const
{
    std::vector<double> act(num_rows(), 0.0);
    for (const Triplet& t : triplets_)
        act[t.row] += t.value * x[t.col];
    return act;
}

void LpModel::validate() const
{
    for (int j = 0; j < num_cols(); ++j) {
        if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j] ||
            lower_[j] == kInf || upper_[j] == -kInf)
            throw Error(ErrorKind::ValidationError, "column '" + col_names_[j] + "' has invalid bounds");
        if (!std::isfinite(cost_[j]))
            throw Error(ErrorKind::ValidationError, "column '" + col_names_[j] + "' has non-finite cost");
        if (binary_[j] && (lower_[j] < 0.0 || upper_[j] > 1.0))
            throw Error(ErrorKind::ValidationError,
                        "binary column '" + col_names_[j] + "' has bounds outside [0,1]");
    }
    for (int i = 0; i < num_rows(); ++i) {
        if (!std::isfinite(rhs_[i]))
            throw Error(ErrorKind::ValidationError, "row '" + row_names_[i] + "' has non-finite rhs");
    }
    for (const Triplet& t : triplets_) {
        if (t.row < 0 || t.row >= num_rows() || t.col < 0 || t.col >= num_cols())
            throw Error(ErrorKind::ValidationError, "triplet references an invalid index");
        if (!std::isfinite(t.value))
            throw Error(ErrorKind::ValidationError,
                        "non-finite coefficient in row '" + row_names_[t.row] + "'");
    }
    if (!std::isfinite(objective_constant_))
        throw Error(ErrorKind::ValidationError, "non-finite objective constant");
}

Residual primal_residual(const LpModel& model, std::span<const double> x)
{
    Residual r;
    for (int j = 0; j < model.num_cols(); ++j) {
        const double lo = model.col_lower(j), hi = model.col_upper(j);
        double v = 0.0;
        if (x[j] < lo)
            v = (lo - x[j]) / std::max(1.0, std::abs(lo));
        else if (x[j] > hi)
            v = (x[j] - hi) / std::max(1.0, std::abs(hi));
        if (v > r.max_violation) {
            r.max_violation = v;
            r.worst_col = j;
            r.worst_row = -1;
        }
    }
    const std::vector<double> act = model.row_activity(x);
    for (int i = 0; i < model.num_rows(); ++i) {
        const double b = model.row_rhs(i);
        double v = 0.0;
        switch (model.row_sense(i)) {
        case RowSense::Le: v = act[i] - b; break;
        case RowSense::Ge: v = b - act[i]; break;
        case RowSense::Eq: v = std::abs(act[i] - b); break;
        }
        v = std::max(0.0, v) / std::max(1.0, std::abs(b));
        if (v > r.max_violation) {
            r.max_violation = v;
            r.worst_row = i;
            r.worst_col = -1;
        }
    }
    return r;
}

DualityCertificate check_duality(const LpModel& model, const Solution& sol)
{
    DualityCertificate cert;
    if (sol.row_dual.size() != static_cast<std::size_t>(model.num_rows()) ||
        sol.primal.size() != static_cast<std::size_t>(model.num_cols()))
        throw Error(ErrorKind::ValidationError, "solution carries no dual information");

    // Lagrangian L = c'x - y'(Ax - b); d = c - A'y.
    std::vector<double> d(model.costs());
    for (const Triplet& t : model.triplets())
        d[t.col] -= t.value * sol.row_dual[t.row];

    double dual_obj = model.objective_constant();
    double infeas = 0.0;
    for (int i = 0; i < model.num_rows(); ++i) {
        const double y = sol.row_dual[i];
        dual_obj += y * model.row_rhs(i);
        if (model.row_sense(i) == RowSense::Le)
            infeas = std::max(infeas, y);
        else if (model.row_sense(i) == RowSense::Ge)
            infeas = std::max(infeas, -y);
    }
    for (int j = 0; j < model.num_cols(); ++j) {
        const double lo = model.col_lower(j), hi = model.col_upper(j);
        if (d[j] > 0.0) {
            if (std::isfinite(lo))
                dual_obj += d[j] * lo;
            else
                infeas = std::max(infeas, d[j]);
        } else if (d[j] < 0.0) {
            if (std::isfinite(hi))
                dual_obj += d[j] * hi;
            else
                infeas = std::max(infeas, -d[j]);
        }
    }
    cert.primal_objective = model.objective_value(sol.primal);
    cert.dual_objective = dual_obj;
    cert.gap = std::abs(cert.primal_objective - dual_obj) / std::max(1.0, std::abs(cert.primal_objective));
    cert.max_dual_infeasibility = infeas;
    return cert;
}

}  // namespace capexp::lp
