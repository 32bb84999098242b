#pragma once

#include <vector>

#include "bregmanot/types.hpp"

namespace bregmanot {

// Entropy E(pi) = -sum_ij pi_ij (log pi_ij - 1) with the convention
// 0 log 0 = 0. Returns -infinity when any entry is negative (the entropy's
// domain indicator).
double entropy(const Matrix& plan);
double entropy(const Array& plan);

// KL(pi | xi) = sum_ij pi_ij (log(pi_ij / xi_ij) - 1); zero entries of pi
// contribute nothing. The "-1" term is part of the divergence used by every
// closed-form projection here, so it is not optional.
double kl_divergence(const Matrix& plan, const Matrix& kernel);
double kl_divergence(const Array& plan, const Array& kernel);

// KL_lambda(pi | xi) = sum_k lambda_k KL(pi_k | xi_k) for simplex weights.
// Slots with lambda_k = 0 contribute nothing regardless of their plan.
double weighted_kl(const std::vector<Matrix>& plans,
                   const std::vector<Matrix>& kernels, const Vector& weights);

}  // namespace bregmanot
