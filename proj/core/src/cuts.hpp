#pragma once

// Internal to the LP core: Gomory mixed-integer cuts read off an optimal
// simplex basis, used by branch and bound at the root.

#include <span>
#include <vector>

#include "capexp/lp_model.hpp"
#include "capexp/simplex.hpp"

namespace capexp::lp {

struct Cut {
    std::vector<Term> terms;  // structural columns only
    double rhs = 0.0;         // sum(terms) >= rhs
    double violation = 0.0;   // at the point the cut was derived from, scaled
};

/// One cut per basic binary whose value is fractional by more than
/// min_frac. Cuts failing the dynamism or support checks are dropped, so
/// every returned cut is valid for the integer hull of the model under the
/// given bounds.
std::vector<Cut> gomory_cuts(const LpModel& model, std::span<const double> lower, std::span<const double> upper,
                             const Basis& basis, std::span<const double> x, double min_frac = 0.01,
                             int max_cuts = 100);

}  // namespace capexp::lp
