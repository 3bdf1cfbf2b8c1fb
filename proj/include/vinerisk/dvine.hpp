#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vinerisk/copula.hpp"
#include "vinerisk/dependence.hpp"

namespace vinerisk {

// Single-response D-vine regression: the response sits at a leaf of a path
// V - U_1 - ... - U_q (predictors in selection order), so the conditional
// CDF C_{V|U_1..U_q} is a pure h-function recursion with no integration.
//
// trees[k-1] holds tree k's pair copulas: the response edge
// (V, U_k ; U_1..k-1) first, then the predictor edges (U_i, U_{i+k} ; ...)
// ascending in i.  With q predictors there are (q+1)q/2 edges in total.
struct DVineModel {
    std::vector<std::string> order;
    std::vector<std::vector<PairCopula>> trees;
    std::vector<double> cll_trace; // conditional log-likelihood after each step
};

// Greedy forward selection: each step tries every remaining predictor,
// extends the path, and keeps the one with the best conditional
// log-likelihood of the response.  Runs exactly max_p steps; equal criteria
// resolve to the lexicographically smaller predictor name.  An empty
// candidate span means default_candidates().
DVineModel fit_dvine(const std::vector<double>& response_u,
                     const std::vector<NamedColumn>& predictors_u,
                     std::size_t max_p,
                     std::span<const FamilyId> candidates = {});

// Edge accessor by path position: i < j, response is node 0.
const PairCopula& dvine_edge(const DVineModel& m, std::size_t i, std::size_t j);

// C_{V|U}(v | u) via the h-function recursion; u aligned with model.order.
double cond_cdf(const DVineModel& m, double v, std::span<const double> u);

// log c_{V|U}(v | u): sum of the response-edge log densities.
double cond_log_density(const DVineModel& m, double v,
                        std::span<const double> u);

// Inverse of cond_cdf in v (monotone bisection; residual checked to 1e-8).
double cond_quantile(const DVineModel& m, double alpha,
                     std::span<const double> u);

// Sum of cond_log_density over aligned observation rows.  predictors_u must
// carry the model's selected columns (matched by name, any order).
double cond_loglik(const DVineModel& m, const std::vector<double>& response_u,
                   const std::vector<NamedColumn>& predictors_u);

} // namespace vinerisk
