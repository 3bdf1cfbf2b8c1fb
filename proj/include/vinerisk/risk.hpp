#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vinerisk/dependence.hpp"
#include "vinerisk/dvine.hpp"
#include "vinerisk/marginals.hpp"
#include "vinerisk/yvine.hpp"

namespace vinerisk {

// Event thresholds on the index scale (frost index, drought index).
struct ThresholdPair {
    double y_f = -2.0;
    double y_d = -1.5;
};

enum class RiskKind { frost, drought, joint };

std::string to_string(RiskKind kind);
RiskKind risk_kind_from_string(const std::string& s);

// One year's conditional risk probabilities, one entry per grid cell in the
// caller's cell order.
struct RiskSurface {
    int year = 0;
    RiskKind kind = RiskKind::frost;
    std::vector<double> cell_probs;
};

// Survival curve for one cell: values[k] = (T, survival over [start_year, T]).
struct SurvivalSeries {
    std::size_t cell = 0;
    int start_year = 0;
    std::vector<std::pair<int, double>> values;
};

// Per-cell return periods in years since the start year; a missing value
// means the survival curve never dropped to the threshold in the covered
// window.
struct ReturnPeriodMap {
    int start_year = 0;
    double threshold = 0.5;
    std::vector<std::optional<double>> years;
};

struct CellInfo {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
};

// P(response <= threshold | predictors) per cell.  Predictor columns hold one
// x-scale value per cell and are matched to model.order by name, as are the
// predictor marginals; anything the order needs but the inputs lack is an
// error.
RiskSurface univariate_risk(const DVineModel& model,
                            const KernelMarginal& response_marginal,
                            double threshold,
                            const std::vector<NamedColumn>& x_columns,
                            const std::map<std::string, KernelMarginal>& predictor_marginals,
                            int year, RiskKind kind);

// P(frost <= y_f, drought <= y_d | predictors) per cell via the Y-vine's
// bivariate conditional CDF.
RiskSurface joint_risk(const YVineModel& model,
                       const KernelMarginal& frost_marginal,
                       const KernelMarginal& drought_marginal,
                       const ThresholdPair& thresholds,
                       const std::vector<NamedColumn>& x_columns,
                       const std::map<std::string, KernelMarginal>& predictor_marginals,
                       int year);

// True when the empirical quantile of the surface's cell probabilities
// (interpolated order statistics) exceeds the cutoff.
bool flag_extreme_year(const RiskSurface& surface, double quantile = 0.95,
                       double cutoff = 0.2);

// 1 - sum of the cell's per-year probabilities over [s, T], clamped to [0,1].
// T = s-1 is the empty-sum convention and gives 1.  The surfaces must all
// carry the same kind and cover every year in range.
double survival(std::span<const RiskSurface> surfaces, std::size_t cell,
                int s, int T);

// Same sum without the clamp, for diagnostics.
double survival_raw(std::span<const RiskSurface> surfaces, std::size_t cell,
                    int s, int T);

SurvivalSeries survival_series(std::span<const RiskSurface> surfaces,
                               std::size_t cell, int s, int t_end);

// Years until the survival curve first drops to the threshold, linearly
// interpolated between the bracketing integer years; empty if it never does
// within the covered window [start, max year].
std::optional<double> return_period(std::span<const RiskSurface> surfaces,
                                    std::size_t cell, int start,
                                    double threshold = 0.5);

ReturnPeriodMap return_period_map(std::span<const RiskSurface> surfaces,
                                  int start, double threshold = 0.5);

// CSV emitters.  cells supplies id and geography in the same order as
// cell_probs.
std::string risk_surface_csv(const RiskSurface& surface,
                             std::span<const CellInfo> cells);
std::string survival_series_csv(std::span<const SurvivalSeries> series,
                                std::span<const CellInfo> cells);
std::string return_period_csv(const ReturnPeriodMap& map,
                              std::span<const CellInfo> cells);

// Inverse of risk_surface_csv, for downstream commands that consume emitted
// surfaces.
struct ParsedSurface {
    RiskSurface surface;
    std::vector<CellInfo> cells;
};

ParsedSurface risk_surface_from_csv(const std::string& text);

} // namespace vinerisk
