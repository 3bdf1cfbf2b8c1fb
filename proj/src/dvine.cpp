#include "vinerisk/dvine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "vinerisk/errors.hpp"
#include "vinerisk/optimize.hpp"
#include "vine_path.hpp"

namespace vinerisk {

namespace {

// edges keyed by path positions (i, j), i < j, response at 0
using edge_map = std::map<std::pair<std::size_t, std::size_t>, PairCopula>;

std::vector<std::vector<PairCopula>> assemble_trees(const edge_map& edges,
                                                    std::size_t q) {
    std::vector<std::vector<PairCopula>> trees(q);
    for (std::size_t t = 1; t <= q; ++t) {
        trees[t - 1].push_back(edges.at({0, t}));
        for (std::size_t i = 1; i + t <= q; ++i)
            trees[t - 1].push_back(edges.at({i, i + t}));
    }
    return trees;
}

} // namespace

DVineModel fit_dvine(const std::vector<double>& response_u,
                     const std::vector<NamedColumn>& predictors_u,
                     std::size_t max_p,
                     std::span<const FamilyId> candidates) {
    const std::size_t n = response_u.size();
    if (max_p > predictors_u.size())
        throw param_error("fit_dvine: max_p " + std::to_string(max_p) +
                          " exceeds the " + std::to_string(predictors_u.size()) +
                          " supplied predictors");
    if (n < 50)
        throw data_error("fit_dvine: need at least 50 observations, got " +
                         std::to_string(n));
    detail::check_u_column(response_u, "fit_dvine: response", n);
    for (const auto& col : predictors_u)
        detail::check_u_column(col.values, "fit_dvine: predictor '" + col.name +
                                               "'",
                               n);

    // candidate predictors in name order so equal criteria pick the smaller
    std::vector<std::size_t> remaining(predictors_u.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
    std::sort(remaining.begin(), remaining.end(),
              [&](std::size_t a, std::size_t b) {
                  return predictors_u[a].name < predictors_u[b].name;
              });

    DVineModel model;
    std::vector<std::vector<double>> arrays; // predictor path state
    std::vector<double> resp = response_u;   // C_{V|U_1..m} per obs
    edge_map edges;
    double cll = 0.0;

    for (std::size_t step = 1; step <= max_p; ++step) {
        bool have_best = false;
        double best_crit = 0.0;
        std::size_t best_pos = 0;
        detail::PathExtension best_ext;
        PairCopula best_resp_edge;

        for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
            const NamedColumn& cand = predictors_u[remaining[pos]];
            try {
                auto ext = detail::extend_predictor_path(arrays, cand.values,
                                                         candidates);
                PairCopula resp_edge = select_family(resp, ext.b1, candidates);
                double crit = cll + resp_edge.loglik;
                if (!have_best || crit > best_crit) {
                    have_best = true;
                    best_crit = crit;
                    best_pos = pos;
                    best_ext = std::move(ext);
                    best_resp_edge = resp_edge;
                }
            } catch (const error& e) {
                throw data_error("fit_dvine: step " + std::to_string(step) +
                                 ", predictor '" + cand.name + "': " + e.what());
            }
        }

        const std::size_t chosen = remaining[best_pos];
        const std::size_t m = step; // new path node index
        arrays = std::move(best_ext.arrays);
        for (std::size_t i = 1; i < m; ++i)
            edges[{i, m}] = best_ext.edges[i - 1];
        edges[{0, m}] = best_resp_edge;
        for (std::size_t r = 0; r < n; ++r)
            resp[r] = hfunc(best_resp_edge, resp[r], best_ext.b1[r], Side::first);
        cll = best_crit;
        model.order.push_back(predictors_u[chosen].name);
        model.cll_trace.push_back(cll);
        remaining.erase(remaining.begin() +
                        static_cast<std::ptrdiff_t>(best_pos));
    }

    model.trees = assemble_trees(edges, max_p);
    return model;
}

const PairCopula& dvine_edge(const DVineModel& m, std::size_t i,
                             std::size_t j) {
    const std::size_t t = j - i;
    return m.trees[t - 1][i == 0 ? 0 : i];
}

namespace {

void check_cond_args(const DVineModel& m, double v, std::span<const double> u,
                     const char* what) {
    if (u.size() != m.order.size())
        throw data_error(std::string(what) + ": conditioning vector length " +
                         std::to_string(u.size()) + " != model order " +
                         std::to_string(m.order.size()));
    if (!(v > 0.0 && v < 1.0))
        throw param_error(std::string(what) + ": response value outside (0,1)");
}

// run the response chain; when log_density is non-null, accumulate the
// response-edge log densities along the way
double response_chain(const DVineModel& m, double v, std::span<const double> u,
                      double* log_density) {
    auto pred_edge = [&m](std::size_t i, std::size_t j) -> const PairCopula& {
        return dvine_edge(m, i, j);
    };
    std::vector<double> b1 = detail::path_b1_row(pred_edge, u);
    double r = interior(v);
    if (log_density) *log_density = 0.0;
    for (std::size_t k = 1; k <= u.size(); ++k) {
        const PairCopula& e = dvine_edge(m, 0, k);
        if (log_density) *log_density += cop_log_pdf(e, r, b1[k - 1]);
        r = hfunc(e, r, b1[k - 1], Side::first);
    }
    return r;
}

} // namespace

double cond_cdf(const DVineModel& m, double v, std::span<const double> u) {
    check_cond_args(m, v, u, "cond_cdf");
    return response_chain(m, v, u, nullptr);
}

double cond_log_density(const DVineModel& m, double v,
                        std::span<const double> u) {
    check_cond_args(m, v, u, "cond_log_density");
    double ld = 0.0;
    response_chain(m, v, u, &ld);
    return ld;
}

double cond_quantile(const DVineModel& m, double alpha,
                     std::span<const double> u) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw param_error("cond_quantile: alpha outside (0,1)");
    if (u.size() != m.order.size())
        throw data_error("cond_quantile: conditioning vector length mismatch");
    auto g = [&](double v) { return response_chain(m, v, u, nullptr); };
    double v = bisect_increasing(g, 1e-10, 1.0 - 1e-10, alpha, 1e-14);
    double residual = std::abs(g(v) - alpha);
    if (residual > 1e-8)
        throw numeric_error("cond_quantile: no convergence, residual " +
                            std::to_string(residual));
    return v;
}

double cond_loglik(const DVineModel& m, const std::vector<double>& response_u,
                   const std::vector<NamedColumn>& predictors_u) {
    const std::size_t n = response_u.size();
    std::vector<const std::vector<double>*> cols;
    for (const std::string& name : m.order) {
        auto it = std::find_if(predictors_u.begin(), predictors_u.end(),
                               [&](const NamedColumn& c) {
                                   return c.name == name;
                               });
        if (it == predictors_u.end())
            throw data_error("cond_loglik: missing predictor column '" + name +
                             "'");
        if (it->values.size() != n)
            throw data_error("cond_loglik: column '" + name +
                             "' length mismatch");
        cols.push_back(&it->values);
    }
    double total = 0.0;
    std::vector<double> u(m.order.size());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < cols.size(); ++k) u[k] = (*cols[k])[r];
        total += cond_log_density(m, response_u[r], u);
    }
    return total;
}

} // namespace vinerisk
