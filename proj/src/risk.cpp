#include "vinerisk/risk.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>

#include "vinerisk/errors.hpp"
#include "vinerisk/stats.hpp"
#include "format.hpp"

namespace vinerisk {

namespace {

// Resolves the per-cell u-rows for a model's predictor order: each ordered
// name must have an x-scale column and a marginal to PIT it through.
std::vector<std::vector<double>>
build_u_rows(const std::vector<std::string>& order, const char* where,
             const std::vector<NamedColumn>& x_columns,
             const std::map<std::string, KernelMarginal>& predictor_marginals) {
    if (x_columns.empty())
        throw data_error(std::string(where) + ": no predictor columns, cell count unknown");
    std::size_t n_cells = x_columns.front().values.size();
    for (const auto& col : x_columns)
        if (col.values.size() != n_cells)
            throw data_error(std::string(where) + ": column '" + col.name + "' has " +
                             std::to_string(col.values.size()) + " cells, expected " +
                             std::to_string(n_cells));

    std::vector<std::vector<double>> u(n_cells, std::vector<double>(order.size()));
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::string& name = order[k];
        auto col = std::find_if(x_columns.begin(), x_columns.end(),
                                [&](const NamedColumn& c) { return c.name == name; });
        if (col == x_columns.end())
            throw data_error(std::string(where) + ": no predictor column '" + name + "'");
        auto marg = predictor_marginals.find(name);
        if (marg == predictor_marginals.end())
            throw data_error(std::string(where) + ": no marginal for predictor '" + name + "'");
        for (std::size_t l = 0; l < n_cells; ++l) {
            double x = col->values[l];
            if (!std::isfinite(x))
                throw data_error(std::string(where) + ": non-finite value in column '" +
                                 name + "' at cell " + std::to_string(l));
            u[l][k] = cdf_eval(marg->second, x);
        }
    }
    return u;
}

const RiskSurface& surface_for_year(std::span<const RiskSurface> surfaces,
                                    int year, const char* where) {
    const RiskSurface* found = nullptr;
    for (const auto& s : surfaces) {
        if (s.year != year) continue;
        if (found)
            throw data_error(std::string(where) + ": duplicate surface for year " +
                             std::to_string(year));
        found = &s;
    }
    if (!found)
        throw data_error(std::string(where) + ": no surface for year " +
                         std::to_string(year));
    return *found;
}

double cell_prob(const RiskSurface& s, std::size_t cell, const char* where) {
    if (cell >= s.cell_probs.size())
        throw data_error(std::string(where) + ": cell index " + std::to_string(cell) +
                         " out of range for year " + std::to_string(s.year));
    return s.cell_probs[cell];
}

void check_one_kind(std::span<const RiskSurface> surfaces, const char* where) {
    for (const auto& s : surfaces)
        if (s.kind != surfaces.front().kind)
            throw data_error(std::string(where) + ": surfaces mix risk kinds");
}

} // namespace

std::string to_string(RiskKind kind) {
    switch (kind) {
    case RiskKind::frost: return "frost";
    case RiskKind::drought: return "drought";
    case RiskKind::joint: return "joint";
    }
    throw param_error("to_string: bad RiskKind");
}

RiskKind risk_kind_from_string(const std::string& s) {
    if (s == "frost") return RiskKind::frost;
    if (s == "drought") return RiskKind::drought;
    if (s == "joint") return RiskKind::joint;
    throw data_error("risk_kind_from_string: unknown kind '" + s + "'");
}

RiskSurface univariate_risk(const DVineModel& model,
                            const KernelMarginal& response_marginal,
                            double threshold,
                            const std::vector<NamedColumn>& x_columns,
                            const std::map<std::string, KernelMarginal>& predictor_marginals,
                            int year, RiskKind kind) {
    if (!std::isfinite(threshold))
        throw param_error("univariate_risk: threshold must be finite");
    auto u_rows = build_u_rows(model.order, "univariate_risk", x_columns,
                               predictor_marginals);
    double v = cdf_eval(response_marginal, threshold);
    RiskSurface out;
    out.year = year;
    out.kind = kind;
    out.cell_probs.reserve(u_rows.size());
    for (const auto& u : u_rows)
        out.cell_probs.push_back(cond_cdf(model, v, u));
    return out;
}

RiskSurface joint_risk(const YVineModel& model,
                       const KernelMarginal& frost_marginal,
                       const KernelMarginal& drought_marginal,
                       const ThresholdPair& thresholds,
                       const std::vector<NamedColumn>& x_columns,
                       const std::map<std::string, KernelMarginal>& predictor_marginals,
                       int year) {
    if (!std::isfinite(thresholds.y_f) || !std::isfinite(thresholds.y_d))
        throw param_error("joint_risk: thresholds must be finite");
    auto u_rows = build_u_rows(model.order, "joint_risk", x_columns,
                               predictor_marginals);
    double v1 = cdf_eval(frost_marginal, thresholds.y_f);
    double v2 = cdf_eval(drought_marginal, thresholds.y_d);
    RiskSurface out;
    out.year = year;
    out.kind = RiskKind::joint;
    out.cell_probs.reserve(u_rows.size());
    for (const auto& u : u_rows)
        out.cell_probs.push_back(bivariate_cond_cdf(model, v1, v2, u));
    return out;
}

bool flag_extreme_year(const RiskSurface& surface, double quantile,
                       double cutoff) {
    if (!(quantile >= 0.0 && quantile <= 1.0))
        throw param_error("flag_extreme_year: quantile must be in [0,1], got " +
                          std::to_string(quantile));
    if (surface.cell_probs.empty())
        throw data_error("flag_extreme_year: empty surface");
    std::vector<double> sorted = surface.cell_probs;
    std::sort(sorted.begin(), sorted.end());
    return quantile_type7(sorted, quantile) > cutoff;
}

double survival_raw(std::span<const RiskSurface> surfaces, std::size_t cell,
                    int s, int T) {
    if (T < s - 1)
        throw param_error("survival: T must be at least s-1, got s=" +
                          std::to_string(s) + " T=" + std::to_string(T));
    check_one_kind(surfaces, "survival");
    double acc = 0.0;
    for (int t = s; t <= T; ++t)
        acc += cell_prob(surface_for_year(surfaces, t, "survival"), cell, "survival");
    return 1.0 - acc;
}

double survival(std::span<const RiskSurface> surfaces, std::size_t cell,
                int s, int T) {
    return std::clamp(survival_raw(surfaces, cell, s, T), 0.0, 1.0);
}

SurvivalSeries survival_series(std::span<const RiskSurface> surfaces,
                               std::size_t cell, int s, int t_end) {
    if (t_end < s)
        throw param_error("survival_series: end year before start year");
    check_one_kind(surfaces, "survival");
    SurvivalSeries out;
    out.cell = cell;
    out.start_year = s;
    out.values.reserve(static_cast<std::size_t>(t_end - s) + 1);
    double acc = 0.0;
    for (int t = s; t <= t_end; ++t) {
        acc += cell_prob(surface_for_year(surfaces, t, "survival"), cell, "survival");
        out.values.emplace_back(t, std::clamp(1.0 - acc, 0.0, 1.0));
    }
    return out;
}

std::optional<double> return_period(std::span<const RiskSurface> surfaces,
                                    std::size_t cell, int start,
                                    double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw param_error("return_period: threshold must be in (0,1), got " +
                          std::to_string(threshold));
    if (surfaces.empty())
        throw data_error("return_period: no surfaces");
    check_one_kind(surfaces, "return_period");
    int end = surfaces.front().year;
    for (const auto& s : surfaces) end = std::max(end, s.year);
    if (end < start)
        throw data_error("return_period: no surface at or after year " +
                         std::to_string(start));

    double acc = 0.0;
    double prev = 1.0;
    for (int t = start; t <= end; ++t) {
        acc += cell_prob(surface_for_year(surfaces, t, "return_period"), cell,
                         "return_period");
        double cur = std::clamp(1.0 - acc, 0.0, 1.0);
        if (cur <= threshold)
            return static_cast<double>(t - start) +
                   (prev - threshold) / (prev - cur);
        prev = cur;
    }
    return std::nullopt;
}

ReturnPeriodMap return_period_map(std::span<const RiskSurface> surfaces,
                                  int start, double threshold) {
    if (surfaces.empty())
        throw data_error("return_period_map: no surfaces");
    std::size_t n_cells = surfaces.front().cell_probs.size();
    for (const auto& s : surfaces)
        if (s.cell_probs.size() != n_cells)
            throw data_error("return_period_map: year " + std::to_string(s.year) +
                             " has " + std::to_string(s.cell_probs.size()) +
                             " cells, expected " + std::to_string(n_cells));
    ReturnPeriodMap out;
    out.start_year = start;
    out.threshold = threshold;
    out.years.reserve(n_cells);
    for (std::size_t cell = 0; cell < n_cells; ++cell)
        out.years.push_back(return_period(surfaces, cell, start, threshold));
    return out;
}

std::string risk_surface_csv(const RiskSurface& surface,
                             std::span<const CellInfo> cells) {
    if (cells.size() != surface.cell_probs.size())
        throw data_error("risk_surface_csv: " + std::to_string(cells.size()) +
                         " cells for " + std::to_string(surface.cell_probs.size()) +
                         " probabilities");
    std::string out = "year,cell_id,lat,lon,prob,kind\n";
    std::string kind = to_string(surface.kind);
    for (std::size_t l = 0; l < cells.size(); ++l) {
        out += std::to_string(surface.year);
        out += ',';
        out += cells[l].id;
        out += ',';
        out += detail::g17(cells[l].lat);
        out += ',';
        out += detail::g17(cells[l].lon);
        out += ',';
        out += detail::g17(surface.cell_probs[l]);
        out += ',';
        out += kind;
        out += '\n';
    }
    return out;
}

std::string survival_series_csv(std::span<const SurvivalSeries> series,
                                std::span<const CellInfo> cells) {
    std::string out = "cell_id,s,T,survival\n";
    for (const auto& sr : series) {
        if (sr.cell >= cells.size())
            throw data_error("survival_series_csv: cell index " +
                             std::to_string(sr.cell) + " out of range");
        for (const auto& [t, surv] : sr.values) {
            out += cells[sr.cell].id;
            out += ',';
            out += std::to_string(sr.start_year);
            out += ',';
            out += std::to_string(t);
            out += ',';
            out += detail::g17(surv);
            out += '\n';
        }
    }
    return out;
}

ParsedSurface risk_surface_from_csv(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    if (lines.empty() || lines[0] != "year,cell_id,lat,lon,prob,kind")
        throw data_error("risk_surface_from_csv: bad or missing header");

    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::string field;
        for (char c : line) {
            if (c == ',') {
                out.push_back(field);
                field.clear();
            } else {
                field += c;
            }
        }
        out.push_back(field);
        return out;
    };
    auto to_double = [](const std::string& s, std::size_t ln) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (!end || *end != '\0' || !std::isfinite(v))
            throw data_error("risk_surface_from_csv: row " + std::to_string(ln) +
                             ": cannot parse '" + s + "'");
        return v;
    };

    ParsedSurface out;
    bool first = true;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        std::vector<std::string> f = split(lines[ln]);
        if (f.size() != 6)
            throw data_error("risk_surface_from_csv: row " + std::to_string(ln + 1) +
                             " has " + std::to_string(f.size()) + " fields");
        int year = static_cast<int>(to_double(f[0], ln + 1));
        RiskKind kind = risk_kind_from_string(f[5]);
        if (first) {
            out.surface.year = year;
            out.surface.kind = kind;
            first = false;
        } else if (year != out.surface.year || kind != out.surface.kind) {
            throw data_error("risk_surface_from_csv: mixed year or kind at row " +
                             std::to_string(ln + 1));
        }
        out.cells.push_back({f[1], to_double(f[2], ln + 1), to_double(f[3], ln + 1)});
        out.surface.cell_probs.push_back(to_double(f[4], ln + 1));
    }
    if (first)
        throw data_error("risk_surface_from_csv: no rows");
    return out;
}

std::string return_period_csv(const ReturnPeriodMap& map,
                              std::span<const CellInfo> cells) {
    if (cells.size() != map.years.size())
        throw data_error("return_period_csv: " + std::to_string(cells.size()) +
                         " cells for " + std::to_string(map.years.size()) +
                         " return periods");
    std::string out = "cell_id,years\n";
    for (std::size_t l = 0; l < cells.size(); ++l) {
        out += cells[l].id;
        out += ',';
        out += map.years[l] ? detail::g17(*map.years[l]) : std::string("NA");
        out += '\n';
    }
    return out;
}

} // namespace vinerisk
