#include "vinerisk/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "vinerisk/dependence.hpp"
#include "vinerisk/errors.hpp"
#include "vinerisk/normal.hpp"
#include "vinerisk/rng.hpp"
#include "format.hpp"

namespace vinerisk {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

double parse_double(const std::string& s, std::size_t line_no,
                    const std::string& column) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
    if (!end || *end != '\0')
        throw data_error("load_grid_csv: row " + std::to_string(line_no) +
                         ", column '" + column + "': cannot parse '" + s + "'");
    return v;
}

long parse_long(const std::string& s, std::size_t line_no,
                const std::string& column) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
    if (!end || *end != '\0')
        throw data_error("load_grid_csv: row " + std::to_string(line_no) +
                         ", column '" + column + "': cannot parse '" + s + "'");
    return v;
}

std::size_t header_index(const std::vector<std::string>& header,
                         const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw data_error("load_grid_csv: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

template <typename F>
auto with_context(const std::string& ctx, F&& f) {
    try {
        return f();
    } catch (const param_error& e) {
        throw param_error(ctx + ": " + e.what());
    } catch (const numeric_error& e) {
        throw numeric_error(ctx + ": " + e.what());
    } catch (const data_error& e) {
        throw data_error(ctx + ": " + e.what());
    }
}

// ascending rank PIT: value at overall rank r (1-based) maps to r/(n+1)
std::vector<double> rank_pit(const std::vector<double>& values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> u(values.size());
    double denom = static_cast<double>(values.size()) + 1.0;
    for (std::size_t r = 0; r < idx.size(); ++r)
        u[idx[r]] = static_cast<double>(r + 1) / denom;
    return u;
}

void classify(FamilyCounts& counts, const PairCopula& pc) {
    switch (pc.family.kind) {
    case FamilyKind::gaussian: ++counts.gaussian; break;
    case FamilyKind::independence: ++counts.independence; break;
    default: ++counts.nongaussian; break;
    }
}

} // namespace

GridDataset parse_grid_csv(const std::string& text, const CsvSchema& schema) {
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
    if (!cur.empty()) {
        if (cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
    }
    if (lines.empty())
        throw data_error("load_grid_csv: empty input");

    std::vector<std::string> header = split_fields(lines[0]);
    std::size_t i_year = header_index(header, schema.year);
    std::size_t i_cell = header_index(header, schema.cell_id);
    std::size_t i_lat = header_index(header, schema.lat);
    std::size_t i_lon = header_index(header, schema.lon);
    std::size_t i_frost = header_index(header, schema.frost);
    std::size_t i_drought = header_index(header, schema.drought);

    GridDataset ds;
    std::vector<std::size_t> pred_idx;
    std::set<std::size_t> taken{i_year, i_cell, i_lat, i_lon, i_frost, i_drought};
    if (taken.size() != 6)
        throw data_error("load_grid_csv: schema maps two roles to one column");
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (taken.count(j)) continue;
        ds.predictor_names.push_back(header[j]);
        pred_idx.push_back(j);
    }

    std::set<std::pair<int, long>> seen;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (is_blank(lines[ln])) continue;
        std::vector<std::string> fields = split_fields(lines[ln]);
        if (fields.size() != header.size())
            throw data_error("load_grid_csv: row " + std::to_string(ln + 1) +
                             " has " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(header.size()));
        if (std::any_of(fields.begin(), fields.end(), is_blank)) {
            ++ds.dropped_rows;
            continue;
        }

        GridRow row;
        row.year = static_cast<int>(parse_long(fields[i_year], ln + 1, schema.year));
        row.cell_id = parse_long(fields[i_cell], ln + 1, schema.cell_id);
        row.lat = parse_double(fields[i_lat], ln + 1, schema.lat);
        row.lon = parse_double(fields[i_lon], ln + 1, schema.lon);
        row.frost = parse_double(fields[i_frost], ln + 1, schema.frost);
        row.drought = parse_double(fields[i_drought], ln + 1, schema.drought);
        row.predictors.reserve(pred_idx.size());
        for (std::size_t k = 0; k < pred_idx.size(); ++k)
            row.predictors.push_back(parse_double(fields[pred_idx[k]], ln + 1,
                                                  ds.predictor_names[k]));

        bool complete = std::isfinite(row.lat) && std::isfinite(row.lon) &&
                        std::isfinite(row.frost) && std::isfinite(row.drought) &&
                        std::all_of(row.predictors.begin(), row.predictors.end(),
                                    [](double v) { return std::isfinite(v); });
        if (!complete) {
            ++ds.dropped_rows;
            continue;
        }
        if (!seen.insert({row.year, row.cell_id}).second)
            throw data_error("load_grid_csv: duplicate (year, cell) record (" +
                             std::to_string(row.year) + ", " +
                             std::to_string(row.cell_id) + ")");
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

GridDataset load_grid_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("load_grid_csv: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_grid_csv(buf.str(), schema);
}

std::string grid_csv(const GridDataset& ds) {
    std::string out = "year,cell_id,lat,lon,frost,drought";
    for (const auto& name : ds.predictor_names) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (const auto& row : ds.rows) {
        out += std::to_string(row.year);
        out += ',';
        out += std::to_string(row.cell_id);
        out += ',';
        out += detail::g17(row.lat);
        out += ',';
        out += detail::g17(row.lon);
        out += ',';
        out += detail::g17(row.frost);
        out += ',';
        out += detail::g17(row.drought);
        for (double v : row.predictors) {
            out += ',';
            out += detail::g17(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<int> years_present(const GridDataset& ds) {
    std::vector<int> years;
    for (const auto& row : ds.rows) years.push_back(row.year);
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());
    return years;
}

YearSlice year_slice(const GridDataset& ds, int year) {
    YearSlice slice;
    slice.year = year;
    slice.predictors.resize(ds.predictor_names.size());
    for (const auto& row : ds.rows) {
        if (row.year != year) continue;
        slice.cell_ids.push_back(row.cell_id);
        slice.lat.push_back(row.lat);
        slice.lon.push_back(row.lon);
        slice.frost.push_back(row.frost);
        slice.drought.push_back(row.drought);
        for (std::size_t k = 0; k < row.predictors.size(); ++k)
            slice.predictors[k].push_back(row.predictors[k]);
    }
    if (slice.cell_ids.empty())
        throw data_error("year_slice: no records for year " + std::to_string(year));
    return slice;
}

std::vector<CellInfo> slice_cells(const YearSlice& slice) {
    std::vector<CellInfo> cells;
    cells.reserve(slice.cell_ids.size());
    for (std::size_t l = 0; l < slice.cell_ids.size(); ++l)
        cells.push_back({std::to_string(slice.cell_ids[l]), slice.lat[l],
                         slice.lon[l]});
    return cells;
}

AnnualModelSet fit_annual_models(const GridDataset& ds, int year,
                                 const FitConfig& config) {
    YearSlice slice = year_slice(ds, year);
    std::size_t n = slice.cell_ids.size();
    if (n < 50)
        throw data_error("fit_annual_models: year " + std::to_string(year) +
                         " has " + std::to_string(n) + " cells, need at least 50");

    std::string ctx = "fit_annual_models: year " + std::to_string(year);
    AnnualModelSet ms;
    ms.year = year;

    auto add_marginal = [&](const std::string& name,
                            const std::vector<double>& values) {
        with_context(ctx + ", marginal '" + name + "'", [&] {
            ms.marginals.emplace(name, fit_kde(values));
            return 0;
        });
    };
    add_marginal("frost", slice.frost);
    add_marginal("drought", slice.drought);
    add_marginal("lat", slice.lat);
    add_marginal("lon", slice.lon);
    for (std::size_t k = 0; k < ds.predictor_names.size(); ++k)
        add_marginal(ds.predictor_names[k], slice.predictors[k]);

    auto pit = [&](const std::string& name, const std::vector<double>& values) {
        const KernelMarginal& m = ms.marginals.at(name);
        std::vector<double> u(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            u[i] = cdf_eval(m, values[i]);
        return u;
    };

    std::vector<double> u_frost = pit("frost", slice.frost);
    std::vector<double> u_drought = pit("drought", slice.drought);
    std::vector<NamedColumn> preds;
    preds.push_back({"lat", pit("lat", slice.lat)});
    preds.push_back({"lon", pit("lon", slice.lon)});
    for (std::size_t k = 0; k < ds.predictor_names.size(); ++k)
        preds.push_back({ds.predictor_names[k],
                         pit(ds.predictor_names[k], slice.predictors[k])});

    std::size_t max_p = std::min(config.max_p, preds.size());
    std::span<const FamilyId> cands = config.candidates;

    ms.dvine_frost = with_context(ctx + ", dvine_frost", [&] {
        return fit_dvine(u_frost, preds, max_p, cands);
    });
    ms.dvine_drought = with_context(ctx + ", dvine_drought", [&] {
        return fit_dvine(u_drought, preds, max_p, cands);
    });
    ms.yvine = with_context(ctx + ", yvine", [&] {
        return fit_yvine(u_frost, u_drought, preds, max_p, cands);
    });
    return ms;
}

std::map<std::string, double>
predictor_ranks(const std::vector<std::vector<std::string>>& orders,
                std::span<const std::string> predictors) {
    if (orders.empty())
        throw data_error("predictor_ranks: no orders");
    std::map<std::string, double> score;
    for (const auto& name : predictors) score[name] = 0.0;
    for (const auto& order : orders) {
        if (order.size() > 5)
            throw data_error("predictor_ranks: order has " +
                             std::to_string(order.size()) + " entries, limit 5");
        for (std::size_t k = 0; k < order.size(); ++k)
            score[order[k]] += static_cast<double>(5 - k);
    }
    double denom = static_cast<double>(orders.size());
    for (auto& [name, s] : score) s /= denom;
    return score;
}

OptimalOrder optimal_order(const std::vector<std::vector<std::string>>& orders) {
    if (orders.empty())
        throw data_error("optimal_order: no orders");
    std::set<std::string> universe;
    std::size_t max_len = 0;
    for (const auto& order : orders) {
        max_len = std::max(max_len, order.size());
        universe.insert(order.begin(), order.end());
    }

    OptimalOrder out;
    std::set<std::string> chosen;
    for (std::size_t k = 0; k < max_len && chosen.size() < universe.size(); ++k) {
        std::map<std::string, std::size_t> counts;
        for (const auto& name : universe)
            if (!chosen.count(name)) counts[name] = 0;
        for (const auto& order : orders)
            if (k < order.size() && !chosen.count(order[k])) ++counts[order[k]];

        std::string best;
        std::size_t best_count = 0;
        bool have = false;
        for (const auto& [name, c] : counts) {
            if (!have || c > best_count) {
                best = name;
                best_count = c;
                have = true;
            }
        }
        std::vector<std::string> tied;
        for (const auto& [name, c] : counts)
            if (c == best_count) tied.push_back(name);
        if (best_count > 0 && tied.size() > 1) {
            std::string report = "position " + std::to_string(k + 1) +
                                 ": tie between ";
            for (std::size_t i = 0; i < tied.size(); ++i) {
                if (i) report += ", ";
                report += tied[i];
            }
            report += " (" + std::to_string(best_count) +
                      " appearances); chose " + best;
            out.ties.push_back(std::move(report));
        }
        out.order.push_back(best);
        chosen.insert(best);
    }
    return out;
}

FamilyCounts count_families(const DVineModel& m) {
    FamilyCounts counts;
    for (const auto& tree : m.trees)
        for (const auto& pc : tree) classify(counts, pc);
    return counts;
}

FamilyCounts count_families(const YVineModel& m) {
    FamilyCounts counts;
    for (const auto& pc : m.edges_v1) classify(counts, pc);
    for (const auto& pc : m.edges_v2) classify(counts, pc);
    for (const auto& tree : m.predictor_trees)
        for (const auto& pc : tree) classify(counts, pc);
    classify(counts, m.top_copula);
    return counts;
}

ModelSetFamilyCounts family_counts(const AnnualModelSet& ms) {
    return {count_families(ms.dvine_frost), count_families(ms.dvine_drought),
            count_families(ms.yvine)};
}

TauSeriesRow tau_series_row(const YearSlice& slice, const AnnualModelSet& ms) {
    TauSeriesRow row;
    row.year = slice.year;
    row.unconditional = kendall_tau(slice.frost, slice.drought);
    row.conditional = conditional_tau(ms.yvine).tau;
    return row;
}

YVineModel synthetic_generator(SyntheticPreset preset) {
    auto pc = [](FamilyKind kind, double theta, int rotation = 0) {
        return make_pair_copula(FamilyId{kind, rotation}, theta);
    };
    PairCopula indep = pc(FamilyKind::independence, 0.0);

    YVineModel m;
    m.order = {"p1", "p2"};
    m.predictor_trees = {{indep}};
    switch (preset) {
    case SyntheticPreset::mixed:
        m.edges_v1 = {pc(FamilyKind::gaussian, 0.6), pc(FamilyKind::clayton, 1.0)};
        m.edges_v2 = {pc(FamilyKind::gumbel, 1.8), pc(FamilyKind::gaussian, 0.4)};
        m.top_copula = pc(FamilyKind::gaussian, 0.3);
        break;
    case SyntheticPreset::zero_dependence:
        m.edges_v1 = {indep, indep};
        m.edges_v2 = {indep, indep};
        m.top_copula = indep;
        break;
    case SyntheticPreset::shared_predictors:
        m.edges_v1 = {pc(FamilyKind::gaussian, 0.7), pc(FamilyKind::gaussian, 0.3)};
        m.edges_v2 = {pc(FamilyKind::gaussian, 0.65), pc(FamilyKind::gaussian, 0.25)};
        m.top_copula = indep;
        break;
    case SyntheticPreset::dependent_top:
        m.edges_v1 = {pc(FamilyKind::gaussian, 0.5), pc(FamilyKind::clayton, 0.9)};
        m.edges_v2 = {pc(FamilyKind::gaussian, 0.45), pc(FamilyKind::gumbel, 1.35)};
        // gaussian rho giving Kendall tau exactly 0.2
        m.top_copula = pc(FamilyKind::gaussian,
                          std::sin(0.1 * 3.14159265358979323846));
        break;
    }
    return m;
}

Synthetic generate_synthetic(const SyntheticConfig& config) {
    if (config.grid_nx == 0 || config.grid_ny == 0)
        throw param_error("generate_synthetic: empty grid");
    if (config.grid_nx * config.grid_ny < 2)
        throw param_error("generate_synthetic: need at least 2 cells");
    if (config.n_years == 0)
        throw param_error("generate_synthetic: need at least 1 year");
    if (config.n_predictors < 2)
        throw param_error("generate_synthetic: need at least 2 predictors");

    Synthetic out;
    out.generator = synthetic_generator(config.preset);

    GridDataset& ds = out.data;
    for (std::size_t k = 0; k < config.n_predictors; ++k)
        ds.predictor_names.push_back("p" + std::to_string(k + 1));

    std::size_t nx = config.grid_nx, ny = config.grid_ny;
    std::size_t n_cells = nx * ny;
    double x_div = static_cast<double>(std::max<std::size_t>(nx - 1, 1));
    double y_div = static_cast<double>(std::max<std::size_t>(ny - 1, 1));
    const double two_pi = 6.283185307179586476925286766559;

    for (std::size_t t = 0; t < config.n_years; ++t) {
        // smooth per-predictor fields: a few low-frequency sinusoids + noise
        std::vector<std::vector<double>> fields(config.n_predictors);
        for (std::size_t k = 0; k < config.n_predictors; ++k) {
            Rng rng(derive_seed(config.seed, "field",
                                t * config.n_predictors + k));
            double fx[3], fy[3], amp[3], phase[3];
            for (int j = 0; j < 3; ++j) {
                fx[j] = static_cast<double>(1 + rng.raw() % 3);
                fy[j] = static_cast<double>(1 + rng.raw() % 3);
                amp[j] = (0.6 + 0.9 * rng.uniform()) / static_cast<double>(j + 1);
                phase[j] = two_pi * rng.uniform();
            }
            fields[k].resize(n_cells);
            for (std::size_t iy = 0; iy < ny; ++iy) {
                for (std::size_t ix = 0; ix < nx; ++ix) {
                    double gx = static_cast<double>(ix) / x_div;
                    double gy = static_cast<double>(iy) / y_div;
                    double v = 0.0;
                    for (int j = 0; j < 3; ++j)
                        v += amp[j] *
                             std::sin(two_pi * (fx[j] * gx + fy[j] * gy) +
                                      phase[j]);
                    fields[k][iy * nx + ix] = v + 0.35 * rng.normal();
                }
            }
        }

        std::vector<double> u1 = rank_pit(fields[0]);
        std::vector<double> u2 = rank_pit(fields[1]);

        Rng rng(derive_seed(config.seed, "response", t));
        for (std::size_t iy = 0; iy < ny; ++iy) {
            for (std::size_t ix = 0; ix < nx; ++ix) {
                std::size_t c = iy * nx + ix;
                double w1 = interior(rng.uniform());
                double w2 = interior(rng.uniform());
                std::vector<double> u{u1[c], u2[c]};
                auto [v1, v2] = conditional_draw(out.generator, u, w1, w2);

                GridRow row;
                row.year = config.first_year + static_cast<int>(t);
                row.cell_id = static_cast<long>(c) + 1;
                row.lat = 47.0 + 0.25 * static_cast<double>(iy);
                row.lon = 10.0 + 0.25 * static_cast<double>(ix);
                row.frost = -0.5 + 1.1 * norm_quantile(v1);
                row.drought = 0.3 + 0.9 * norm_quantile(v2);
                row.predictors.reserve(config.n_predictors);
                for (std::size_t k = 0; k < config.n_predictors; ++k)
                    row.predictors.push_back(fields[k][c]);
                ds.rows.push_back(std::move(row));
            }
        }
    }
    return out;
}

} // namespace vinerisk
