#include "capexp/uc_block.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <unordered_set>

#include "capexp/error.hpp"

namespace capexp {

int UnitCommitmentBlock::add_variable(std::string name, double lower, double upper, double cost, bool binary)
{
    const int id = static_cast<int>(vars_.size());
    if (!index_.emplace(name, id).second)
        throw Error(ErrorKind::ValidationError, fmt::format("block variable '{}' declared twice", name));
    vars_.push_back({std::move(name), lower, upper, cost, binary, false});
    return id;
}

int UnitCommitmentBlock::add_external(std::string name)
{
    if (auto it = index_.find(name); it != index_.end()) {
        if (!vars_[it->second].external)
            throw Error(ErrorKind::ValidationError, fmt::format("'{}' is already an owned variable", name));
        return it->second;
    }
    const int id = static_cast<int>(vars_.size());
    index_.emplace(name, id);
    vars_.push_back({std::move(name), -lp::kInf, lp::kInf, 0.0, false, true});
    return id;
}

int UnitCommitmentBlock::add_row(std::string name, std::string tag, std::vector<BlockTerm> terms,
                                 lp::RowSense sense, double rhs)
{
    rows_.push_back({std::move(name), std::move(tag), std::move(terms), sense, rhs});
    return static_cast<int>(rows_.size()) - 1;
}

std::optional<int> UnitCommitmentBlock::find(const std::string& name) const
{
    if (auto it = index_.find(name); it != index_.end())
        return it->second;
    return std::nullopt;
}

int UnitCommitmentBlock::var(const std::string& name) const
{
    if (auto id = find(name))
        return *id;
    throw Error(ErrorKind::ValidationError, fmt::format("block has no variable '{}'", name));
}

std::vector<std::pair<std::string, int>> UnitCommitmentBlock::tag_counts() const
{
    std::vector<std::pair<std::string, int>> out;
    for (const BlockRow& r : rows_) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == r.tag; });
        if (it == out.end())
            out.emplace_back(r.tag, 1);
        else
            ++it->second;
    }
    return out;
}

void UnitCommitmentBlock::validate() const
{
    std::unordered_set<std::string> names;
    for (const BlockRow& r : rows_) {
        if (r.tag.empty())
            throw Error(ErrorKind::ValidationError, fmt::format("row '{}' has no tag", r.name));
        if (!names.insert(r.name).second)
            throw Error(ErrorKind::ValidationError, fmt::format("row '{}' declared twice", r.name));
        for (const BlockTerm& t : r.terms)
            if (t.var < 0 || t.var >= static_cast<int>(vars_.size()))
                throw Error(ErrorKind::ValidationError, fmt::format("row '{}' references an undeclared variable", r.name));
    }
}

std::vector<int> merge_block(lp::LpModel& model, const UnitCommitmentBlock& block)
{
    block.validate();
    std::vector<int> cols;
    cols.reserve(block.variables().size());
    for (const BlockVariable& v : block.variables()) {
        if (v.external) {
            auto c = model.find_col(v.name);
            if (!c)
                throw Error(ErrorKind::ValidationError, fmt::format("external variable '{}' not in model", v.name));
            cols.push_back(*c);
        } else {
            cols.push_back(model.add_column(v.name, v.lower, v.upper, v.cost, v.binary));
        }
    }
    for (const BlockRow& r : block.rows()) {
        const int row = model.add_row(r.name, r.sense, r.rhs);
        for (const BlockTerm& t : r.terms)
            model.add_coefficient(row, cols[t.var], t.coef);
    }
    return cols;
}

}  // namespace capexp
