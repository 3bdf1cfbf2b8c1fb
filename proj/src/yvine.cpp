#include "vinerisk/yvine.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "vinerisk/errors.hpp"
#include "vinerisk/quadrature.hpp"
#include "vinerisk/rng.hpp"
#include "vine_path.hpp"

namespace vinerisk {

namespace {

void check_u_vector(const YVineModel& m, std::span<const double> u,
                    const char* what) {
    if (u.size() != m.order.size())
        throw data_error(std::string(what) + ": conditioning vector length " +
                         std::to_string(u.size()) + " != model order " +
                         std::to_string(m.order.size()));
}

void check_prob(double v, const char* what) {
    if (!(v > 0.0 && v < 1.0))
        throw param_error(std::string(what) +
                          ": response value outside (0,1)");
}

std::vector<double> b1_row(const YVineModel& m, std::span<const double> u) {
    auto edge = [&m](std::size_t i, std::size_t j) -> const PairCopula& {
        return yvine_pred_edge(m, i, j);
    };
    return detail::path_b1_row(edge, u);
}

// chain C_{V|U_1..q} for one response; optionally accumulates edge log
// densities
double chain(const std::vector<PairCopula>& edges, double v,
             const std::vector<double>& b1, double* log_density) {
    double r = interior(v);
    if (log_density) *log_density = 0.0;
    for (std::size_t k = 0; k < b1.size(); ++k) {
        if (log_density) *log_density += cop_log_pdf(edges[k], r, b1[k]);
        r = hfunc(edges[k], r, b1[k], Side::first);
    }
    return r;
}

double chain_inverse(const std::vector<PairCopula>& edges, double s,
                     const std::vector<double>& b1) {
    double z = s;
    for (std::size_t k = b1.size(); k >= 1; --k)
        z = hinv(edges[k - 1], z, b1[k - 1], Side::first);
    return z;
}

} // namespace

YVineModel fit_yvine(const std::vector<double>& v1_u,
                     const std::vector<double>& v2_u,
                     const std::vector<NamedColumn>& predictors_u,
                     std::size_t max_p,
                     std::span<const FamilyId> candidates) {
    const std::size_t n = v1_u.size();
    if (max_p > predictors_u.size())
        throw param_error("fit_yvine: max_p " + std::to_string(max_p) +
                          " exceeds the " + std::to_string(predictors_u.size()) +
                          " supplied predictors");
    if (n < 50)
        throw data_error("fit_yvine: need at least 50 observations, got " +
                         std::to_string(n));
    detail::check_u_column(v1_u, "fit_yvine: first response", n);
    detail::check_u_column(v2_u, "fit_yvine: second response", n);
    for (const auto& col : predictors_u)
        detail::check_u_column(col.values, "fit_yvine: predictor '" + col.name +
                                               "'",
                               n);

    std::vector<std::size_t> remaining(predictors_u.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
    std::sort(remaining.begin(), remaining.end(),
              [&](std::size_t a, std::size_t b) {
                  return predictors_u[a].name < predictors_u[b].name;
              });

    YVineModel model;
    std::vector<std::vector<double>> arrays;
    std::vector<double> r1 = v1_u, r2 = v2_u;
    std::vector<std::vector<PairCopula>> pred_edges_by_node; // per step
    double edge_cll = 0.0;

    for (std::size_t step = 1; step <= max_p; ++step) {
        bool have_best = false;
        double best_crit = 0.0;
        std::size_t best_pos = 0;
        detail::PathExtension best_ext;
        PairCopula best_e1, best_e2, best_top;

        for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
            const NamedColumn& cand = predictors_u[remaining[pos]];
            try {
                auto ext = detail::extend_predictor_path(arrays, cand.values,
                                                         candidates);
                PairCopula e2 = select_family(r2, ext.b1, candidates);
                PairCopula e1 = select_family(r1, ext.b1, candidates);
                std::vector<double> nr1(n), nr2(n);
                for (std::size_t r = 0; r < n; ++r) {
                    nr1[r] = hfunc(e1, r1[r], ext.b1[r], Side::first);
                    nr2[r] = hfunc(e2, r2[r], ext.b1[r], Side::first);
                }
                PairCopula top = select_family(nr1, nr2, candidates);
                double crit =
                    edge_cll + e1.loglik + e2.loglik + top.loglik;
                if (!have_best || crit > best_crit) {
                    have_best = true;
                    best_crit = crit;
                    best_pos = pos;
                    best_ext = std::move(ext);
                    best_e1 = e1;
                    best_e2 = e2;
                    best_top = top;
                }
            } catch (const error& e) {
                throw data_error("fit_yvine: step " + std::to_string(step) +
                                 ", predictor '" + cand.name + "': " + e.what());
            }
        }

        const std::size_t chosen = remaining[best_pos];
        arrays = std::move(best_ext.arrays);
        for (std::size_t r = 0; r < n; ++r) {
            r1[r] = hfunc(best_e1, r1[r], best_ext.b1[r], Side::first);
            r2[r] = hfunc(best_e2, r2[r], best_ext.b1[r], Side::first);
        }
        pred_edges_by_node.push_back(std::move(best_ext.edges));
        model.edges_v1.push_back(best_e1);
        model.edges_v2.push_back(best_e2);
        model.top_copula = best_top;
        edge_cll += best_e1.loglik + best_e2.loglik;
        model.order.push_back(predictors_u[chosen].name);
        model.cll_trace.push_back(best_crit);
        remaining.erase(remaining.begin() +
                        static_cast<std::ptrdiff_t>(best_pos));
    }

    if (max_p == 0) model.top_copula = select_family(v1_u, v2_u, candidates);

    // regroup predictor edges from per-node lists into per-tree lists; for a
    // fixed tree t the contributing nodes m2 = t + i arrive in ascending i
    model.predictor_trees.assign(max_p >= 1 ? max_p - 1 : 0, {});
    for (std::size_t m2 = 2; m2 <= max_p; ++m2)
        for (std::size_t i = 1; i < m2; ++i)
            model.predictor_trees[m2 - i - 1].push_back(
                pred_edges_by_node[m2 - 1][i - 1]);
    return model;
}

const PairCopula& yvine_pred_edge(const YVineModel& m, std::size_t i,
                                  std::size_t j) {
    return m.predictor_trees[j - i - 1][i - 1];
}

double cond_cdf_v1(const YVineModel& m, double v1, std::span<const double> u) {
    check_u_vector(m, u, "cond_cdf_v1");
    check_prob(v1, "cond_cdf_v1");
    return chain(m.edges_v1, v1, b1_row(m, u), nullptr);
}

double cond_cdf_v2(const YVineModel& m, double v2, std::span<const double> u) {
    check_u_vector(m, u, "cond_cdf_v2");
    check_prob(v2, "cond_cdf_v2");
    return chain(m.edges_v2, v2, b1_row(m, u), nullptr);
}

double cond_density_v2(const YVineModel& m, double v2,
                       std::span<const double> u) {
    check_u_vector(m, u, "cond_density_v2");
    check_prob(v2, "cond_density_v2");
    double ld = 0.0;
    chain(m.edges_v2, v2, b1_row(m, u), &ld);
    return std::exp(ld);
}

double cond_density_v1_given_v2(const YVineModel& m, double v1, double v2,
                                std::span<const double> u) {
    check_u_vector(m, u, "cond_density_v1_given_v2");
    check_prob(v1, "cond_density_v1_given_v2");
    check_prob(v2, "cond_density_v1_given_v2");
    std::vector<double> b1 = b1_row(m, u);
    double ld = 0.0;
    double s1 = chain(m.edges_v1, v1, b1, &ld);
    double s2 = chain(m.edges_v2, v2, b1, nullptr);
    return std::exp(ld + cop_log_pdf(m.top_copula, s1, s2));
}

double cond_cdf_v1_given_v2(const YVineModel& m, double v1, double v2,
                            std::span<const double> u, std::size_t nodes) {
    check_u_vector(m, u, "cond_cdf_v1_given_v2");
    check_prob(v1, "cond_cdf_v1_given_v2");
    check_prob(v2, "cond_cdf_v1_given_v2");
    std::vector<double> b1 = b1_row(m, u);
    double s2 = chain(m.edges_v2, v2, b1, nullptr);
    const GaussRule& rule = gauss_legendre(nodes);
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double vp = 0.5 * v1 * (rule.nodes[i] + 1.0);
        double ld = 0.0;
        double s1 = chain(m.edges_v1, vp, b1, &ld);
        total += 0.5 * v1 * rule.weights[i] *
                 std::exp(ld + cop_log_pdf(m.top_copula, s1, s2));
    }
    return std::min(total, 1.0);
}

double bivariate_cond_cdf(const YVineModel& m, double v1, double v2,
                          std::span<const double> u, std::size_t nodes) {
    check_u_vector(m, u, "bivariate_cond_cdf");
    check_prob(v1, "bivariate_cond_cdf");
    check_prob(v2, "bivariate_cond_cdf");
    std::vector<double> b1 = b1_row(m, u);
    double s1 = chain(m.edges_v1, v1, b1, nullptr);
    const GaussRule& rule = gauss_legendre(nodes);
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double vp = 0.5 * v2 * (rule.nodes[i] + 1.0);
        double ld = 0.0;
        double s2 = chain(m.edges_v2, vp, b1, &ld);
        total += 0.5 * v2 * rule.weights[i] * std::exp(ld) *
                 hfunc(m.top_copula, s1, s2, Side::first);
    }
    return std::clamp(total, 0.0, 1.0);
}

ConditionalTau conditional_tau(const YVineModel& m) {
    return {m.top_copula.family, m.top_copula.theta, m.top_copula.tau};
}

std::pair<double, double> conditional_draw(const YVineModel& m,
                                           std::span<const double> u,
                                           double w1, double w2) {
    check_u_vector(m, u, "conditional_draw");
    check_prob(w1, "conditional_draw");
    check_prob(w2, "conditional_draw");
    std::vector<double> b1 = b1_row(m, u);
    double v2 = chain_inverse(m.edges_v2, w2, b1);
    double s1 = hinv(m.top_copula, w1, w2, Side::first);
    double v1 = chain_inverse(m.edges_v1, s1, b1);
    return {v1, v2};
}

std::vector<YVineDraw> simulate_yvine(const YVineModel& m, std::size_t n,
                                      std::uint64_t seed) {
    if (n < 1) throw param_error("simulate_yvine: n must be positive");
    const std::size_t q = m.order.size();
    Rng rng(seed);
    std::vector<YVineDraw> out;
    out.reserve(n);
    for (std::size_t d = 0; d < n; ++d) {
        YVineDraw row;
        row.u.resize(q);
        std::vector<double> a(q), b1(q);
        for (std::size_t k = 1; k <= q; ++k) {
            double z = interior(rng.uniform());
            b1[k - 1] = z;
            for (std::size_t i = 1; i < k; ++i)
                z = hinv(yvine_pred_edge(m, i, k), z, a[i - 1], Side::second);
            row.u[k - 1] = z;
            double bb = z;
            for (std::size_t i = k - 1; i >= 1; --i) {
                const PairCopula& e = yvine_pred_edge(m, i, k);
                double x = a[i - 1];
                double nb = hfunc(e, x, bb, Side::second);
                a[i - 1] = hfunc(e, x, bb, Side::first);
                bb = nb;
            }
            a[k - 1] = z;
        }
        double w1 = interior(rng.uniform());
        double w2 = interior(rng.uniform());
        double v2 = chain_inverse(m.edges_v2, w2, b1);
        double s1 = hinv(m.top_copula, w1, w2, Side::first);
        row.v1 = chain_inverse(m.edges_v1, s1, b1);
        row.v2 = v2;
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace vinerisk
