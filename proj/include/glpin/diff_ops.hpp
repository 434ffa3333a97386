#pragma once

#include "glpin/field.hpp"

namespace glpin {

// Centred second-order differences at interior nodes, using values on
// neighbouring boundary-band nodes. Non-interior nodes are set to NaN.
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& a);
ScalarField curl(const VectorField& a);
ScalarField laplacian(const ScalarField& f);

}  // namespace glpin
