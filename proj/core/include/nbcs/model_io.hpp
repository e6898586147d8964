#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nbcs/learner.hpp"
#include "nbcs/nested_system.hpp"

namespace nbcs {

/// Versioned plain-text format; see docs/model_format.md. The tree is stored
/// as the root coordinates plus the ordered list of split points, and is
/// rebuilt by replaying the splits, so a loaded system is identical to the
/// saved one.
inline constexpr int kModelFormatVersion = 1;

void save_model(std::ostream& out, const Model& model);
void save_model_file(const std::string& path, const Model& model);
/// Throws DataError on malformed or unsupported input.
Model load_model(std::istream& in);
Model load_model_file(const std::string& path);

/// A bare system with weight vectors (no transform or classes), as produced
/// by the polytope approximation.
struct WeightedSystem {
    NestedSystem system;
    std::vector<WeightVector> weights;
};

void save_system(std::ostream& out, const NestedSystem& sys, const std::vector<WeightVector>& weights);
WeightedSystem load_system(std::istream& in);

}  // namespace nbcs
