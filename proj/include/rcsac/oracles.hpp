#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rcsac/maze.hpp"
#include "rcsac/mlp.hpp"

namespace rcsac {

// Independent reference implementations used to cross-check the production
// code paths. Kept deliberately straight-line and free of shared helpers.

// Plain affine/ReLU chain evaluation, no caches, no reuse of the production
// forward pass.
std::vector<double> reference_mlp_eval(const Mlp& net, std::span<const double> input);

// Probability that any of the `risks` Bernoulli events fires, by explicit
// enumeration of all 2^T outcome paths. T <= ~20.
double bernoulli_any_event_prob(std::span<const double> risks);

// Exact probability that N(center, sigma^2 I2) lands inside the closed
// rectangle: product of one-dimensional normal CDF differences.
double analytic_rect_prob(const Rect& r, double cx, double cy, double sigma);

// Flattened parameter view used by the finite-difference harness.
std::vector<double*> mlp_param_refs(Mlp& net);
std::vector<double> grads_flat(const Grads& g);

// Central finite differences of `loss` w.r.t. every parameter of `net`.
std::vector<double> finite_difference_grad(Mlp& net, const std::function<double()>& loss,
                                           double h = 1e-5);

// max_i |a_i - n_i| / max(1, |a_i|, |n_i|)
double max_rel_err(std::span<const double> analytic, std::span<const double> numeric);

}  // namespace rcsac
