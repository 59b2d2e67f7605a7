#pragma once

#include <random>

#include "qcausal/conditioning.hpp"

namespace qcausal {

using Rng = std::mt19937_64;

Matrix random_ginibre(int rows, int cols, Rng& rng);
Matrix random_unitary(int d, Rng& rng);
HermitianOperator random_hermitian(const SpaceLayout& layout, Rng& rng);
// Wishart-type PSD operator with trace 1.
HermitianOperator random_density(const SpaceLayout& layout, Rng& rng, int rank = 0);

// Random process of the given order (a_before_b or b_before_a), obtained by
// fixing the marginal of a random PSD operator.
ProcessMatrix random_ordered_process(CausalOrder order, Rng& rng);

// Random valid process; a mix of causally separable and non-separable cases.
ProcessMatrix random_valid_process(Rng& rng);

// Kraus operators of a random CPTP map from din to dout, split into `outcomes`
// groups that together form an instrument.
std::vector<std::vector<Matrix>> random_instrument(int din, int dout, int outcomes, Rng& rng);

// Random comb Upsilon with tr_C Upsilon = Gamma for a random ordered Gamma.
Comb random_ordered_comb(CombOrder order, Rng& rng);

// Ordered comb whose z-basis outcome 0 is a random strictly ordered process,
// weighted at the largest value the marginal allows.
Comb adversarial_ordered_comb(Rng& rng);

// Random coefficients inside the positivity bound; with probability
// `boundary` the sample sits exactly on the bound.
FCoefficients random_coefficients(Rng& rng, double boundary = 0.1);

}  // namespace qcausal
