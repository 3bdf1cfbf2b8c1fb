#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vinerisk/families.hpp"

namespace vinerisk {

// one observation on the copula scale
struct UPair {
    double u = 0.0;
    double v = 0.0;
};

// Coordinate selector for conditional (h) functions: Side::first means the
// first coordinate is the free one, i.e. h(u | v) = dC/dv; Side::second
// means h(v | u) = dC/du.
enum class Side { first, second };

// A fitted (or constructed) pair copula.  For constructed instances loglik
// is 0, aic is 2 * param_count and n_obs is 0.
struct PairCopula {
    FamilyId family;
    double theta = 0.0;
    double tau = 0.0;         // Kendall's tau implied by (family, theta)
    double loglik = 0.0;
    double aic = 0.0;
    std::size_t n_obs = 0;
};

PairCopula make_pair_copula(FamilyId family, double theta);

// Inputs are clamped into [1e-10, 1 - 1e-10] before evaluation; NaN input is
// a param_error.  theta is validated against the family bounds.
double cop_cdf(FamilyId family, double theta, double u, double v);
double cop_pdf(FamilyId family, double theta, double u, double v);
double cop_log_pdf(FamilyId family, double theta, double u, double v);

// Conditional CDF of the `which` coordinate given the other; output clamped
// into [1e-10, 1 - 1e-10] because it feeds back in as pseudo-data.
double hfunc(FamilyId family, double theta, double u, double v, Side which);

// Inverse of hfunc in its free coordinate: for Side::first returns z with
// hfunc(z, cond, first) = w; for Side::second returns z with
// hfunc(cond, z, second) = w.
double hinv(FamilyId family, double theta, double w, double cond, Side which);

double param_to_tau(FamilyId family, double theta);

// Inverse of param_to_tau; throws param_error when tau lies outside the
// family's attainable range under the bounded parameter interval.
double tau_to_param(FamilyId family, double tau);

inline double cop_cdf(const PairCopula& pc, double u, double v) {
    return cop_cdf(pc.family, pc.theta, u, v);
}
inline double cop_pdf(const PairCopula& pc, double u, double v) {
    return cop_pdf(pc.family, pc.theta, u, v);
}
inline double cop_log_pdf(const PairCopula& pc, double u, double v) {
    return cop_log_pdf(pc.family, pc.theta, u, v);
}
inline double hfunc(const PairCopula& pc, double u, double v, Side which) {
    return hfunc(pc.family, pc.theta, u, v, which);
}
inline double hinv(const PairCopula& pc, double w, double cond, Side which) {
    return hinv(pc.family, pc.theta, w, cond, which);
}

// Maximum likelihood fit of one family on paired u-data.  Derivative-free
// Brent search over the admissible interval, tolerance 1e-8 on theta, seeded
// at the tau inversion of the empirical Kendall tau when attainable (interval
// midpoint otherwise).  Requires n >= 10 and non-degenerate columns.
PairCopula fit_mle(std::span<const double> u, std::span<const double> v,
                   FamilyId family);
PairCopula fit_mle(std::span<const UPair> data, FamilyId family);

// Fits every candidate and keeps the lowest AIC; ties resolve to the earlier
// candidate.  Candidates failing to fit are skipped; if all fail the last
// error is rethrown.  An empty span means default_candidates().
PairCopula select_family(std::span<const double> u, std::span<const double> v,
                         std::span<const FamilyId> candidates = {});
PairCopula select_family(std::span<const UPair> data,
                         std::span<const FamilyId> candidates = {});

// n draws by the conditional distribution method: u from the raw uniform
// stream, v through hinv.  Reproducible for a given seed.
std::vector<UPair> simulate_pair(const PairCopula& pc, std::size_t n,
                                 std::uint64_t seed);

// clamp onto the working interval [1e-10, 1 - 1e-10]
double interior(double u);

} // namespace vinerisk
