#pragma once

#include "diffpoly.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pvad {

// Constraints θ_α = u_{ℓ-m+α} + p_α. The last m generators become passive
// jet variables and partial derivatives are taken in the modified sense.
struct ConstraintContext {
    int m = 0;
    std::vector<DiffPoly> p;
};

struct AlgebraDescriptor {
    std::vector<std::string> names;
    std::vector<std::string> constants;
    std::optional<ConstraintContext> constraint;

    int ell() const { return static_cast<int>(names.size()); }
    // number of generators the structures on this algebra are indexed by
    int ngen() const { return constraint ? ell() - constraint->m : ell(); }
    bool is_constrained_var(int gen) const { return constraint && gen >= ngen() && gen < ell(); }

    int find_name(const std::string& s) const;
    int find_constant(const std::string& s) const;
};

using AlgebraPtr = std::shared_ptr<const AlgebraDescriptor>;

AlgebraPtr make_algebra(std::vector<std::string> names, std::vector<std::string> constants = {});
// same variables, constraint context attached
AlgebraPtr with_constraint(const AlgebraPtr& base, ConstraintContext ctx);
// quotient algebra: the last m generators dropped
AlgebraPtr quotient_algebra(const AlgebraPtr& constrained);

} // namespace pvad
