#pragma once

#include "qcausal/conic.hpp"

namespace qcausal {

// Dense primal-dual interior-point solver for ConicProgram.
//
// Linear equalities are eliminated first (singleton rows are substituted,
// the remainder through an SVD nullspace), directions that do not enter any
// block are dropped, and the reduced LMI is solved by an infeasible-start
// path-following method with the HKM direction and Mehrotra's
// predictor-corrector. Deterministic for a given program.
SolverReport solve_interior_point(const ConicProgram& program, const SolverOptions& options = {});

}  // namespace qcausal
