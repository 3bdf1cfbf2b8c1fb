#pragma once

// Internal sequential D-vine path machinery shared by the single-response
// and bivariate-response regressions.  Nodes on the predictor path are
// 1-based; column i of an array state belongs to node i+1's predecessors.
//
// The per-observation state keeps A[i] = C_{U_{i+1} | U_{i+2..m}} for the m
// nodes selected so far.  Appending node m+1 sweeps i = m..1 computing the
// backward transform b = C_{U_{m+1} | U_{i..m}}; the final b is
// C_{U_{m+1} | U_{1..m}}, the pseudo-observation the response chains need.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vinerisk/copula.hpp"
#include "vinerisk/errors.hpp"

namespace vinerisk::detail {

struct PathExtension {
    std::vector<std::vector<double>> arrays;  // updated A, one column per node
    std::vector<double> b1;                   // C_{U_new | U_selected} per obs
    std::vector<PairCopula> edges;            // edges[i-1] joins nodes (i, m)
};

// Extends the path with a new predictor column, fitting the new
// predictor-predictor edges by family selection.
inline PathExtension extend_predictor_path(
    const std::vector<std::vector<double>>& arrays,
    const std::vector<double>& u_new, std::span<const FamilyId> candidates) {
    const std::size_t m = arrays.size() + 1;
    const std::size_t n = u_new.size();
    PathExtension ext;
    ext.arrays.resize(m);
    ext.edges.resize(m - 1, make_pair_copula(FamilyId{}, 0.0));
    ext.b1 = u_new;
    for (std::size_t i = m - 1; i >= 1; --i) {
        const std::vector<double>& x = arrays[i - 1];
        PairCopula pc = select_family(x, ext.b1, candidates);
        std::vector<double> nb(n), na(n);
        for (std::size_t r = 0; r < n; ++r) {
            nb[r] = hfunc(pc, x[r], ext.b1[r], Side::second);
            na[r] = hfunc(pc, x[r], ext.b1[r], Side::first);
        }
        ext.arrays[i - 1] = std::move(na);
        ext.b1 = std::move(nb);
        ext.edges[i - 1] = pc;
    }
    ext.arrays[m - 1] = u_new;
    return ext;
}

// Single-row version over already-fitted edges; edge(i, j) must return the
// pair copula joining path nodes i < j.  Returns b1[k-1] = C_{U_k | U_1..k-1}.
template <class EdgeFn>
std::vector<double> path_b1_row(EdgeFn&& edge, std::span<const double> u) {
    const std::size_t q = u.size();
    std::vector<double> a(q), b1(q);
    for (std::size_t m = 1; m <= q; ++m) {
        double bb = u[m - 1];
        for (std::size_t i = m - 1; i >= 1; --i) {
            const PairCopula& e = edge(i, m);
            double x = a[i - 1];
            double nb = hfunc(e, x, bb, Side::second);
            a[i - 1] = hfunc(e, x, bb, Side::first);
            bb = nb;
        }
        a[m - 1] = u[m - 1];
        b1[m - 1] = bb;
    }
    return b1;
}

inline void check_u_column(const std::vector<double>& col,
                           const std::string& what, std::size_t expect_n) {
    if (col.size() != expect_n)
        throw data_error(what + ": length " + std::to_string(col.size()) +
                         " does not match " + std::to_string(expect_n));
    for (double v : col)
        if (!(v > 0.0 && v < 1.0))
            throw data_error(what + ": values must lie strictly in (0,1)");
}

} // namespace vinerisk::detail
