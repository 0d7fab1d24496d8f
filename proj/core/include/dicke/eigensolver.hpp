#pragma once

#include <cstdint>
#include <vector>

#include "dicke/krylov.hpp"
#include "dicke/types.hpp"

namespace dicke {

struct EigensolverOptions {
  double residual_tol = 1e-10;  // ||H x - theta x|| for each wanted pair
  int max_basis = 80;           // thick restart when the basis reaches this size
  int max_iterations = 20000;   // operator applications before giving up
  std::uint64_t seed = 0x5eed;  // deterministic start vector
};

struct EigenPairs {
  RVector values;   // ascending
  CMatrix vectors;  // columns, unit norm
  int iterations = 0;
};

// Lowest `count` eigenpairs of a Hermitian operator given as a matrix-free
// map on C^dim. Thick-restart Lanczos with full reorthogonalization: the basis
// grows by the residual of the lowest unconverged Ritz pair, and on restart
// keeps the `count + 2` lowest Ritz vectors. Throws ConvergenceError after
// max_iterations applications.
EigenPairs lowest_eigenpairs(const krylov::LinearMap& apply, Index dim, int count,
                             const EigensolverOptions& options = {});

}  // namespace dicke
