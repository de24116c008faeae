#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "capexp/lp_model.hpp"

namespace capexp {

/// A block variable is either owned (created when the block is merged) or
/// external (must already exist in the target model under the same name,
/// e.g. an investment column shared by several blocks).
struct BlockVariable {
    std::string name;
    double lower = 0.0;
    double upper = lp::kInf;
    double cost = 0.0;
    bool binary = false;
    bool external = false;
};

struct BlockTerm {
    int var;  // index into UnitCommitmentBlock::variables
    double coef;
};

struct BlockRow {
    std::string name;
    std::string tag;  // constraint family, e.g. "ramp_up"
    std::vector<BlockTerm> terms;
    lp::RowSense sense = lp::RowSense::Le;
    double rhs = 0.0;
};

/// Self-contained list of variables and linear rows produced by one builder.
class UnitCommitmentBlock {
public:
    int add_variable(std::string name, double lower, double upper, double cost = 0.0, bool binary = false);
    int add_external(std::string name);
    int add_row(std::string name, std::string tag, std::vector<BlockTerm> terms, lp::RowSense sense,
                double rhs);

    std::optional<int> find(const std::string& name) const;
    int var(const std::string& name) const;  // throws Error(ValidationError) if absent

    const std::vector<BlockVariable>& variables() const { return vars_; }
    std::vector<BlockVariable>& variables() { return vars_; }
    const std::vector<BlockRow>& rows() const { return rows_; }

    /// Row count per tag in insertion order of first appearance.
    std::vector<std::pair<std::string, int>> tag_counts() const;

    /// Rows reference declared variables only, names are unique, every row
    /// carries a tag. Throws Error(ValidationError).
    void validate() const;

private:
    std::vector<BlockVariable> vars_;
    std::vector<BlockRow> rows_;
    std::unordered_map<std::string, int> index_;
};

/// Appends the block to the model and returns the model column of every
/// block variable. External variables are looked up by name.
std::vector<int> merge_block(lp::LpModel& model, const UnitCommitmentBlock& block);

}  // namespace capexp
