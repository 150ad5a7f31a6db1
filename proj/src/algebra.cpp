#include "pvad/algebra.hpp"
#include "pvad/error.hpp"

#include <algorithm>

namespace pvad {

int AlgebraDescriptor::find_name(const std::string& s) const {
    auto it = std::find(names.begin(), names.end(), s);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

int AlgebraDescriptor::find_constant(const std::string& s) const {
    auto it = std::find(constants.begin(), constants.end(), s);
    return it == constants.end() ? -1 : static_cast<int>(it - constants.begin());
}

AlgebraPtr make_algebra(std::vector<std::string> names, std::vector<std::string> constants) {
    auto a = std::make_shared<AlgebraDescriptor>();
    a->names = std::move(names);
    a->constants = std::move(constants);
    return a;
}

AlgebraPtr with_constraint(const AlgebraPtr& base, ConstraintContext ctx) {
    if (ctx.m <= 0 || ctx.m > base->ell() || static_cast<int>(ctx.p.size()) != ctx.m)
        fail(ErrorKind::NotSpecialForm, "bad constraint context");
    auto a = std::make_shared<AlgebraDescriptor>(*base);
    int first = base->ell() - ctx.m;
    for (const auto& p : ctx.p)
        for (int b = first; b < base->ell(); ++b)
            if (p.depends_on_gen(b)) fail(ErrorKind::NotSpecialForm, "p depends on a constrained generator");
    a->constraint = std::move(ctx);
    return a;
}

AlgebraPtr quotient_algebra(const AlgebraPtr& constrained) {
    if (!constrained->constraint) fail(ErrorKind::NotSpecialForm, "no constraint context");
    auto a = std::make_shared<AlgebraDescriptor>();
    a->names.assign(constrained->names.begin(), constrained->names.begin() + constrained->ngen());
    a->constants = constrained->constants;
    return a;
}

} // namespace pvad
