#pragma once

#include <optional>
#include <vector>

#include "supres/subspace.hpp"

namespace supres {

struct EspritSolution {
    CMatrix psi_hat;
    std::vector<cdouble> eigenvalues;
    SupportSet estimated_support;
};

/// Shift-invariance estimate from a signal-space basis. With U0/U1 the first
/// and last M-1 rows, Psi solves U0 Psi ~= U1 in the least-squares sense
/// (singular values of U0 below 1e-12 sigma_1 count as zero) and every
/// eigenvalue lambda of Psi yields omega = -arg(lambda) / (2 pi) mod 1.
///
/// Throws EstimatorError("shift_invariance_degenerate") when U0 loses rank
/// or two estimated frequencies coincide.
EspritSolution esprit_estimate(const SubspaceBasis& basis);

/// min over matchings of the largest torus error between paired points.
/// Exhaustive over permutations for S <= 8, cyclic-shift search otherwise.
double matching_distance(const SupportSet& truth, const SupportSet& estimate);

/// Exhaustive min-max assignment over all S! permutations.
double matching_distance_bruteforce(const SupportSet& truth, const SupportSet& estimate);

/// Min over the S cyclic shifts of the order-preserving assignment of the
/// two sorted point lists.
double matching_distance_cyclic(const SupportSet& truth, const SupportSet& estimate);

struct EspritRun {
    EspritSolution solution;
    std::optional<double> md;
};

/// covariance -> signal space -> esprit_estimate, with the matching distance
/// against the batch's ground truth when it is attached.
EspritRun esprit_pipeline(const SnapshotBatch& batch, int S);

} // namespace supres
