#pragma once

#include "dirac.hpp"

#include <map>
#include <string>
#include <vector>

namespace pvad {

// Fraction pair as declared in a model file. With an offset structure S the
// numerator is A + S_block ∘ B, i.e. the operator represented is S_block + A B^{-1}.
struct FractionDecl {
    std::string name;
    FractionPair pair;
    std::string offset; // structure name or empty
    std::string over;   // constraint set name or empty
    AlgebraPtr alg;     // algebra the entries live in
};

struct ModelFile {
    AlgebraPtr alg;
    std::vector<std::string> order; // structure declaration order
    std::map<std::string, PVAStructure> structures;
    std::map<std::string, FractionDecl> fractions;
    std::map<std::string, ConstraintSet> constraints;

    const PVAStructure& structure(const std::string& name) const;
    const ConstraintSet& constraint(const std::string& name) const;
    const FractionDecl& fraction(const std::string& name) const;
};

ModelFile parse_model(const std::string& text, int depth = -1);
// path on disk, or the name of a built-in model
ModelFile load_model(const std::string& source, int depth = -1);
const std::string& builtin_model(const std::string& name);
bool is_builtin_model(const std::string& name);

// operator text accepted by the parser
std::string emit_scalar(const ScalarForm& f, const AlgebraDescriptor& alg);
std::string emit_entry(const NonlocalForm& f, int i, int j, const AlgebraDescriptor& alg);
// a loadable model fragment: [algebra] plus one [structure NAME]
std::string emit_model(const std::string& name, const NonlocalForm& f, const AlgebraDescriptor& alg);
std::string emit_model(const std::string& name, const MatrixOp& h, const AlgebraDescriptor& alg);

} // namespace pvad
