#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vinerisk/dvine.hpp"
#include "vinerisk/marginals.hpp"
#include "vinerisk/risk.hpp"
#include "vinerisk/yvine.hpp"

namespace vinerisk {

// Maps the required logical columns onto actual header names; every other
// header column is taken as a predictor under its own name.
struct CsvSchema {
    std::string year = "year";
    std::string cell_id = "cell_id";
    std::string lat = "lat";
    std::string lon = "lon";
    std::string frost = "frost";
    std::string drought = "drought";
};

struct GridRow {
    int year = 0;
    long cell_id = 0;
    double lat = 0.0;
    double lon = 0.0;
    double frost = 0.0;
    double drought = 0.0;
    std::vector<double> predictors; // aligned with GridDataset::predictor_names
};

// Gridded annual panel: one row per (year, cell), complete after ingestion
// (rows with blank fields are dropped and counted).
struct GridDataset {
    std::vector<std::string> predictor_names;
    std::vector<GridRow> rows;
    std::size_t dropped_rows = 0;
};

GridDataset parse_grid_csv(const std::string& text,
                           const CsvSchema& schema = {});
GridDataset load_grid_csv(const std::string& path,
                          const CsvSchema& schema = {});
std::string grid_csv(const GridDataset& ds);

std::vector<int> years_present(const GridDataset& ds); // sorted, unique

// Column view of one year, rows ordered as in the dataset.
struct YearSlice {
    int year = 0;
    std::vector<long> cell_ids;
    std::vector<double> lat, lon, frost, drought;
    std::vector<std::vector<double>> predictors; // by predictor, then cell
};

YearSlice year_slice(const GridDataset& ds, int year);
std::vector<CellInfo> slice_cells(const YearSlice& slice);

struct FitConfig {
    std::size_t max_p = 5;
    std::vector<FamilyId> candidates; // empty = default_candidates()
};

// Everything fitted on one year's cells: shared per-variable marginals, the
// two single-response models and the joint model (V1 = frost, V2 = drought).
// lat and lon enter the predictor set alongside the named predictors.
struct AnnualModelSet {
    int year = 0;
    std::map<std::string, KernelMarginal> marginals;
    DVineModel dvine_frost;
    DVineModel dvine_drought;
    YVineModel yvine;
};

AnnualModelSet fit_annual_models(const GridDataset& ds, int year,
                                 const FitConfig& config = {});

// Position-weighted appearance score: a predictor chosen k-th (k = 1..5) in
// a year contributes 6-k; the sum is divided by the number of fitted years.
// Predictors never chosen score 0.
std::map<std::string, double>
predictor_ranks(const std::vector<std::vector<std::string>>& orders,
                std::span<const std::string> predictors);

// Position-wise modal order: slot k gets the predictor appearing most often
// at position k among those not already placed; ties fall to the
// lexicographically smaller name and are reported.
struct OptimalOrder {
    std::vector<std::string> order;
    std::vector<std::string> ties; // one human-readable report per tied slot
};

OptimalOrder optimal_order(const std::vector<std::vector<std::string>>& orders);

struct FamilyCounts {
    std::size_t gaussian = 0;
    std::size_t nongaussian = 0;
    std::size_t independence = 0;

    std::size_t total() const { return gaussian + nongaussian + independence; }
};

FamilyCounts count_families(const DVineModel& m);
FamilyCounts count_families(const YVineModel& m);

struct ModelSetFamilyCounts {
    FamilyCounts dvine_frost;
    FamilyCounts dvine_drought;
    FamilyCounts yvine;
};

ModelSetFamilyCounts family_counts(const AnnualModelSet& ms);

// Dependence contrast for one year: the raw response tau next to the tau of
// the fitted top copula (dependence left after the predictors explain what
// they can).
struct TauSeriesRow {
    int year = 0;
    double unconditional = 0.0;
    double conditional = 0.0;
};

TauSeriesRow tau_series_row(const YearSlice& slice, const AnnualModelSet& ms);

// Synthetic-data generator used by the end-to-end tests: smooth predictor
// fields (low-frequency sinusoid basis plus noise, rank-PIT within year) and
// responses drawn through a known Y-vine over (p1, p2).
enum class SyntheticPreset {
    mixed,             // varied response-edge families, gaussian top
    zero_dependence,   // every edge independence
    shared_predictors, // both responses load p1/p2, independence top
    dependent_top,     // gaussian top with tau 0.2
};

YVineModel synthetic_generator(SyntheticPreset preset);

struct SyntheticConfig {
    std::size_t grid_nx = 10;
    std::size_t grid_ny = 10;
    int first_year = 2000;
    std::size_t n_years = 5;
    std::size_t n_predictors = 3; // p1, p2, ... in addition to lat/lon
    SyntheticPreset preset = SyntheticPreset::mixed;
    std::uint64_t seed = 0;
};

struct Synthetic {
    GridDataset data;
    YVineModel generator;
};

Synthetic generate_synthetic(const SyntheticConfig& config);

} // namespace vinerisk
