#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vinerisk/copula.hpp"
#include "vinerisk/dependence.hpp"

namespace vinerisk {

// Bivariate-response Y-vine regression: both responses are leaves attached
// to a shared predictor path U_1 - ... - U_q, and one top pair copula joins
// (V_1, V_2) given all q predictors.  Edge counts: q per response chain,
// q(q-1)/2 on the predictor path, plus the top — (q+2)(q+1)/2 in total.
//
// edges_v1[k-1] is (V_1, U_k ; U_1..k-1); edges_v2 likewise for V_2.
// predictor_trees[t-1] holds tree t's predictor edges (U_i, U_{i+t} ; ...)
// ascending in i.
struct YVineModel {
    std::vector<std::string> order;
    std::vector<PairCopula> edges_v1;
    std::vector<PairCopula> edges_v2;
    std::vector<std::vector<PairCopula>> predictor_trees;
    PairCopula top_copula;
    std::vector<double> cll_trace; // bivariate conditional ll after each step
};

// Greedy forward selection under the full bivariate conditional
// log-likelihood (both response chains plus the top copula, which is refitted
// for every candidate since its conditioning set grows with the path).
// Runs exactly max_p steps; name-lexicographic tie-break; empty candidate
// span means default_candidates().  With max_p = 0 only the top copula is
// fitted, on the raw response pair.
YVineModel fit_yvine(const std::vector<double>& v1_u,
                     const std::vector<double>& v2_u,
                     const std::vector<NamedColumn>& predictors_u,
                     std::size_t max_p,
                     std::span<const FamilyId> candidates = {});

const PairCopula& yvine_pred_edge(const YVineModel& m, std::size_t i,
                                  std::size_t j);

// Univariate conditional CDFs C_{V1|U} and C_{V2|U} (pure h-recursions).
double cond_cdf_v1(const YVineModel& m, double v1, std::span<const double> u);
double cond_cdf_v2(const YVineModel& m, double v2, std::span<const double> u);

// Conditional density of V2 given the predictors: telescoping product of the
// V2-chain edge densities.
double cond_density_v2(const YVineModel& m, double v2,
                       std::span<const double> u);

// Conditional density of V1 given V2 and the predictors: V1-chain edge
// densities times the top copula density at the transformed pair.
double cond_density_v1_given_v2(const YVineModel& m, double v1, double v2,
                                std::span<const double> u);

// Integral of cond_density_v1_given_v2 over (0, v1), fixed Gauss-Legendre.
double cond_cdf_v1_given_v2(const YVineModel& m, double v1, double v2,
                            std::span<const double> u,
                            std::size_t nodes = 50);

// Joint conditional CDF C_{V1,V2|U}(v1, v2 | u): Gauss-Legendre quadrature
// over v2' in (0, v2) of c_{V2|U}(v2'|u) * C_{V1|V2',U}(v1|v2',u), the last
// factor through the top copula's h-function.
double bivariate_cond_cdf(const YVineModel& m, double v1, double v2,
                          std::span<const double> u, std::size_t nodes = 50);

// The response-pair dependence after removing predictor effects: the top
// copula's family, parameter and implied Kendall tau.
struct ConditionalTau {
    FamilyId family;
    double theta = 0.0;
    double tau = 0.0;
};
ConditionalTau conditional_tau(const YVineModel& m);

// One inverse-Rosenblatt draw of (v1, v2) at the given predictor values from
// uniform inputs w1, w2.
std::pair<double, double> conditional_draw(const YVineModel& m,
                                           std::span<const double> u,
                                           double w1, double w2);

struct YVineDraw {
    double v1 = 0.0;
    double v2 = 0.0;
    std::vector<double> u;
};

// n i.i.d. draws of (v1, v2, u) by inverse Rosenblatt; deterministic per seed.
std::vector<YVineDraw> simulate_yvine(const YVineModel& m, std::size_t n,
                                      std::uint64_t seed);

} // namespace vinerisk
