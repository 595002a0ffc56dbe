#pragma once

#include "perflab/risk.hpp"

namespace perflab {

// Resolution of the structural constants with provenance. A declared value
// always wins; otherwise the analytic value is used where the loss/map admits
// one, and a probe estimate where it does not.

/// Box holding 99.9% of every induced law for theta in the domain.
Box data_region(const Instance& inst, const EvalOptions& opts);

/// Loss constants over domain x data_region (analytic for squared_ridge).
LossConstants loss_constants(const Instance& inst, const EvalOptions& opts);

SourcedConstant resolve_beta(const Instance& inst, const EvalOptions& opts);
SourcedConstant resolve_gamma_sc(const Instance& inst, const EvalOptions& opts);
/// Value-Lipschitz constant of the loss in z, taken over the data region.
SourcedConstant resolve_lip_L(const Instance& inst, const EvalOptions& opts);
/// Every supported map is a translation family, so the operator norm of its
/// response is the exact sensitivity.
SourcedConstant resolve_eps(const Instance& inst);
/// Largest pairwise W1 between induced laws over a theta grid (50 points for
/// d = 1, 5 per axis for d = 2, 3 per axis beyond), unless declared.
SourcedConstant resolve_shift_bound(const Instance& inst, const EvalOptions& opts);

/// W1(D(theta1), D(theta2)): closed form for Gaussian maps in closed-form
/// mode, otherwise exact W1 between two coupled batches (same seed). Batches
/// with more than one data coordinate are truncated to 256 rows to keep the
/// assignment tractable.
double induced_w1(const Instance& inst, const Theta& theta1, const Theta& theta2, const EvalOptions& opts);

}  // namespace perflab
