// vinerisk: fit vine-copula regression models on gridded annual panels and
// turn them into risk surfaces, survival curves and return periods.
//
// Subcommands: fit, risk, survival, simulate, eda.  All outputs land in the
// --out directory; risk reads the model files fit wrote there, survival reads
// the surface CSVs risk wrote there.  Every run echoes its resolved
// configuration to config_echo.json, and identical inputs produce
// byte-identical outputs regardless of --threads.

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "vinerisk/dependence.hpp"
#include "vinerisk/errors.hpp"
#include "vinerisk/pipeline.hpp"
#include "vinerisk/risk.hpp"
#include "vinerisk/serialize.hpp"

namespace fs = std::filesystem;
using namespace vinerisk;

namespace {

struct RunConfig {
    std::string input;
    std::string out = ".";
    std::string years_spec;             // "A:B"
    std::optional<std::pair<int, int>> years;
    std::size_t max_p = 5;
    double y_f = -2.0;
    double y_d = -1.5;
    double flag_quantile = 0.95;
    double flag_cutoff = 0.2;
    double rp_threshold = 0.5;
    std::string families_spec;          // comma-separated tokens
    std::vector<FamilyId> families;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

void add_common_options(CLI::App* cmd, RunConfig& cfg, bool needs_input) {
    cmd->fallthrough(); // lets --config reach the main app, which processes it
    auto* in = cmd->add_option("--input", cfg.input, "input dataset CSV");
    if (needs_input) in->required();
    cmd->add_option("--out", cfg.out, "output directory");
    cmd->add_option("--years", cfg.years_spec, "year range A:B (inclusive)");
    cmd->add_option("--max-p", cfg.max_p, "predictors per model");
    cmd->add_option("--yf", cfg.y_f, "frost-index threshold");
    cmd->add_option("--yd", cfg.y_d, "drought-index threshold");
    cmd->add_option("--flag-quantile", cfg.flag_quantile,
                    "cell quantile for the extreme-year flag");
    cmd->add_option("--flag-cutoff", cfg.flag_cutoff,
                    "probability cutoff for the extreme-year flag");
    cmd->add_option("--rp-threshold", cfg.rp_threshold,
                    "survival level defining the return period");
    cmd->add_option("--families", cfg.families_spec,
                    "comma-separated candidate families (default: all)");
    cmd->add_option("--seed", cfg.seed, "root random seed");
    cmd->add_option("--threads", cfg.threads, "worker threads")
        ->envname("VINERISK_THREADS");
}

void resolve_config(RunConfig& cfg) {
    if (!cfg.years_spec.empty()) {
        auto colon = cfg.years_spec.find(':');
        int a = 0, b = 0;
        try {
            if (colon == std::string::npos) {
                a = b = std::stoi(cfg.years_spec);
            } else {
                a = std::stoi(cfg.years_spec.substr(0, colon));
                b = std::stoi(cfg.years_spec.substr(colon + 1));
            }
        } catch (const std::exception&) {
            throw param_error("--years must be A:B, got '" + cfg.years_spec + "'");
        }
        if (b < a)
            throw param_error("--years range is reversed: " + cfg.years_spec);
        cfg.years = {a, b};
    }
    if (!cfg.families_spec.empty()) {
        std::string token;
        std::stringstream ss(cfg.families_spec);
        while (std::getline(ss, token, ','))
            if (!token.empty()) cfg.families.push_back(family_from_token(token));
        if (cfg.families.empty())
            throw param_error("--families lists no families");
    }
    if (cfg.threads == 0) cfg.threads = 1;
    if (!(std::isfinite(cfg.y_f) && std::isfinite(cfg.y_d)))
        throw param_error("thresholds must be finite");
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw data_error("cannot write '" + path.string() + "'");
    out << content;
}

void write_config_echo(const RunConfig& cfg, const std::string& command) {
    nlohmann::json j{{"command", command},
                     {"input", cfg.input},
                     {"out", cfg.out},
                     {"max_p", cfg.max_p},
                     {"y_f", cfg.y_f},
                     {"y_d", cfg.y_d},
                     {"flag_quantile", cfg.flag_quantile},
                     {"flag_cutoff", cfg.flag_cutoff},
                     {"rp_threshold", cfg.rp_threshold},
                     {"seed", cfg.seed},
                     {"threads", cfg.threads}};
    if (cfg.years)
        j["years"] = {{"first", cfg.years->first}, {"last", cfg.years->second}};
    else
        j["years"] = nullptr;
    if (cfg.families.empty()) {
        j["families"] = "default";
    } else {
        std::vector<std::string> tokens;
        for (const auto& f : cfg.families) tokens.push_back(to_token(f));
        j["families"] = tokens;
    }
    write_file(fs::path(cfg.out) / "config_echo.json", j.dump(2) + "\n");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<int> select_years(const GridDataset& ds, const RunConfig& cfg) {
    std::vector<int> years = years_present(ds);
    if (cfg.years) {
        std::vector<int> kept;
        for (int y : years)
            if (y >= cfg.years->first && y <= cfg.years->second) kept.push_back(y);
        years = std::move(kept);
        if (years.empty())
            throw data_error("no records in requested year range " +
                             cfg.years_spec);
    }
    return years;
}

GridDataset load_input(const RunConfig& cfg) {
    GridDataset ds = load_grid_csv(cfg.input);
    if (ds.rows.empty())
        throw data_error("no records in '" + cfg.input + "'");
    return ds;
}

// runs job(i) for i in [0, n) on cfg.threads workers; results are collected
// by index so downstream writes are order-deterministic; the first exception
// (lowest index wins is not guaranteed, any one of them) is rethrown here
template <typename Job>
void for_each_index(unsigned threads, std::size_t n, Job&& job) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mtx;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(error_mtx);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned n_workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

fs::path model_file(const RunConfig& cfg, int year) {
    return fs::path(cfg.out) / ("models_" + std::to_string(year) + ".json");
}

std::vector<NamedColumn> slice_x_columns(const GridDataset& ds,
                                         const YearSlice& slice) {
    std::vector<NamedColumn> cols;
    cols.push_back({"lat", slice.lat});
    cols.push_back({"lon", slice.lon});
    for (std::size_t k = 0; k < ds.predictor_names.size(); ++k)
        cols.push_back({ds.predictor_names[k], slice.predictors[k]});
    return cols;
}

int run_fit(RunConfig& cfg) {
    GridDataset ds = load_input(cfg);
    std::vector<int> years = select_years(ds, cfg);
    fs::create_directories(cfg.out);
    write_config_echo(cfg, "fit");

    struct YearResult {
        int year = 0;
        std::string model_json;
        std::vector<std::string> frost_order, drought_order, yvine_order;
        ModelSetFamilyCounts counts;
        TauSeriesRow tau;
        std::string failure;
    };
    std::vector<YearResult> results(years.size());

    FitConfig fit_cfg;
    fit_cfg.max_p = cfg.max_p;
    fit_cfg.candidates = cfg.families;

    for_each_index(cfg.threads, years.size(), [&](std::size_t i) {
        YearResult& r = results[i];
        r.year = years[i];
        try {
            AnnualModelSet ms = fit_annual_models(ds, years[i], fit_cfg);
            r.model_json = model_set_json(ms);
            r.frost_order = ms.dvine_frost.order;
            r.drought_order = ms.dvine_drought.order;
            r.yvine_order = ms.yvine.order;
            r.counts = family_counts(ms);
            r.tau = tau_series_row(year_slice(ds, years[i]), ms);
        } catch (const error& e) {
            r.failure = e.what();
        }
    });

    std::string orders_csv = "year,model,position,predictor\n";
    std::string counts_csv = "year,model,gaussian,nongaussian,independence\n";
    std::string tau_csv = "year,tau_unconditional,tau_conditional\n";
    std::map<std::string, std::vector<std::vector<std::string>>> orders_by_model;
    std::vector<std::string> failures;
    std::size_t fitted = 0;

    auto emit_order = [&](int year, const std::string& model,
                          const std::vector<std::string>& order) {
        for (std::size_t k = 0; k < order.size(); ++k)
            orders_csv += std::to_string(year) + "," + model + "," +
                          std::to_string(k + 1) + "," + order[k] + "\n";
        orders_by_model[model].push_back(order);
    };
    auto emit_counts = [&](int year, const std::string& model,
                           const FamilyCounts& c) {
        counts_csv += std::to_string(year) + "," + model + "," +
                      std::to_string(c.gaussian) + "," +
                      std::to_string(c.nongaussian) + "," +
                      std::to_string(c.independence) + "\n";
    };
    char buf[64];
    auto g17 = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };

    for (const YearResult& r : results) {
        if (!r.failure.empty()) {
            failures.push_back("year " + std::to_string(r.year) + ": " + r.failure);
            continue;
        }
        ++fitted;
        write_file(model_file(cfg, r.year), r.model_json);
        emit_order(r.year, "dvine_frost", r.frost_order);
        emit_order(r.year, "dvine_drought", r.drought_order);
        emit_order(r.year, "yvine", r.yvine_order);
        emit_counts(r.year, "dvine_frost", r.counts.dvine_frost);
        emit_counts(r.year, "dvine_drought", r.counts.dvine_drought);
        emit_counts(r.year, "yvine", r.counts.yvine);
        tau_csv += std::to_string(r.year) + "," + g17(r.tau.unconditional) +
                   "," + g17(r.tau.conditional) + "\n";
    }

    std::string ranks_csv = "model,predictor,rank\n";
    std::string optimal_csv = "model,position,predictor\n";
    std::string summary =
        "records: " + std::to_string(ds.rows.size()) +
        "\ndropped_rows: " + std::to_string(ds.dropped_rows) +
        "\nfitted_years: " + std::to_string(fitted) +
        "\nskipped_years: " + std::to_string(failures.size()) + "\n";
    if (fitted > 0) {
        std::vector<std::string> universe{"lat", "lon"};
        universe.insert(universe.end(), ds.predictor_names.begin(),
                        ds.predictor_names.end());
        for (const auto& [model, orders] : orders_by_model) {
            for (const auto& [name, rank] : predictor_ranks(orders, universe))
                ranks_csv += model + "," + name + "," + g17(rank) + "\n";
            OptimalOrder opt = optimal_order(orders);
            for (std::size_t k = 0; k < opt.order.size(); ++k)
                optimal_csv += model + "," + std::to_string(k + 1) + "," +
                               opt.order[k] + "\n";
            for (const auto& tie : opt.ties)
                summary += "tie (" + model + "): " + tie + "\n";
        }
    }
    for (const auto& f : failures) summary += "skipped " + f + "\n";

    write_file(fs::path(cfg.out) / "orders.csv", orders_csv);
    write_file(fs::path(cfg.out) / "ranks.csv", ranks_csv);
    write_file(fs::path(cfg.out) / "optimal_order.csv", optimal_csv);
    write_file(fs::path(cfg.out) / "family_counts.csv", counts_csv);
    write_file(fs::path(cfg.out) / "tau_series.csv", tau_csv);
    write_file(fs::path(cfg.out) / "fit_summary.txt", summary);
    std::cout << "fit: " << fitted << " year(s) fitted, " << failures.size()
              << " skipped, outputs in " << cfg.out << "\n";
    return 0;
}

int run_risk(RunConfig& cfg) {
    GridDataset ds = load_input(cfg);
    std::vector<int> years = select_years(ds, cfg);
    fs::create_directories(cfg.out);
    write_config_echo(cfg, "risk");

    struct YearSurfaces {
        int year = 0;
        std::string frost_csv, drought_csv, joint_csv;
        bool frost_flag = false, drought_flag = false, joint_flag = false;
    };
    std::vector<YearSurfaces> results(years.size());

    for_each_index(cfg.threads, years.size(), [&](std::size_t i) {
        int year = years[i];
        fs::path mf = model_file(cfg, year);
        if (!fs::exists(mf))
            throw data_error("risk: no model file for year " +
                             std::to_string(year) + " (" + mf.string() + ")");
        AnnualModelSet ms = model_set_from_json(read_file(mf));
        YearSlice slice = year_slice(ds, year);
        std::vector<NamedColumn> x_cols = slice_x_columns(ds, slice);
        std::vector<CellInfo> cells = slice_cells(slice);

        RiskSurface frost =
            univariate_risk(ms.dvine_frost, ms.marginals.at("frost"), cfg.y_f,
                            x_cols, ms.marginals, year, RiskKind::frost);
        RiskSurface drought =
            univariate_risk(ms.dvine_drought, ms.marginals.at("drought"),
                            cfg.y_d, x_cols, ms.marginals, year,
                            RiskKind::drought);
        RiskSurface joint =
            joint_risk(ms.yvine, ms.marginals.at("frost"),
                       ms.marginals.at("drought"), {cfg.y_f, cfg.y_d}, x_cols,
                       ms.marginals, year);

        YearSurfaces& r = results[i];
        r.year = year;
        r.frost_csv = risk_surface_csv(frost, cells);
        r.drought_csv = risk_surface_csv(drought, cells);
        r.joint_csv = risk_surface_csv(joint, cells);
        r.frost_flag = flag_extreme_year(frost, cfg.flag_quantile, cfg.flag_cutoff);
        r.drought_flag =
            flag_extreme_year(drought, cfg.flag_quantile, cfg.flag_cutoff);
        r.joint_flag = flag_extreme_year(joint, cfg.flag_quantile, cfg.flag_cutoff);
    });

    std::string flags_csv = "year,kind,flagged\n";
    for (const YearSurfaces& r : results) {
        std::string y = std::to_string(r.year);
        write_file(fs::path(cfg.out) / ("risk_frost_" + y + ".csv"), r.frost_csv);
        write_file(fs::path(cfg.out) / ("risk_drought_" + y + ".csv"),
                   r.drought_csv);
        write_file(fs::path(cfg.out) / ("risk_joint_" + y + ".csv"), r.joint_csv);
        flags_csv += y + ",frost," + (r.frost_flag ? "true" : "false") + "\n";
        flags_csv += y + ",drought," + (r.drought_flag ? "true" : "false") + "\n";
        flags_csv += y + ",joint," + (r.joint_flag ? "true" : "false") + "\n";
    }
    write_file(fs::path(cfg.out) / "extreme_years.csv", flags_csv);
    std::cout << "risk: " << results.size() << " year(s) evaluated, outputs in "
              << cfg.out << "\n";
    return 0;
}

int run_survival(RunConfig& cfg) {
    fs::create_directories(cfg.out);
    write_config_echo(cfg, "survival");

    bool any_kind = false;
    for (RiskKind kind :
         {RiskKind::frost, RiskKind::drought, RiskKind::joint}) {
        std::string kind_name = to_string(kind);
        std::map<int, ParsedSurface> by_year;
        std::string prefix = "risk_" + kind_name + "_";
        if (fs::exists(cfg.out)) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(cfg.out)) {
                std::string name = entry.path().filename().string();
                if (name.rfind(prefix, 0) == 0 &&
                    name.size() > prefix.size() + 4 &&
                    name.substr(name.size() - 4) == ".csv")
                    files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                ParsedSurface ps = risk_surface_from_csv(read_file(f));
                if (ps.surface.kind != kind)
                    throw data_error("survival: " + f.string() +
                                     " holds kind '" +
                                     to_string(ps.surface.kind) + "'");
                by_year.emplace(ps.surface.year, std::move(ps));
            }
        }
        if (by_year.empty()) continue;
        any_kind = true;

        const std::vector<CellInfo>& cells = by_year.begin()->second.cells;
        std::vector<RiskSurface> surfaces;
        for (const auto& [year, ps] : by_year) {
            if (ps.cells.size() != cells.size())
                throw data_error("survival: year " + std::to_string(year) +
                                 " surface has a different cell set");
            surfaces.push_back(ps.surface);
        }

        int s = cfg.years ? cfg.years->first : by_year.begin()->first;
        int t_end = cfg.years ? cfg.years->second : by_year.rbegin()->first;

        std::vector<SurvivalSeries> series;
        series.reserve(cells.size());
        for (std::size_t cell = 0; cell < cells.size(); ++cell)
            series.push_back(survival_series(surfaces, cell, s, t_end));
        write_file(fs::path(cfg.out) / ("survival_" + kind_name + ".csv"),
                   survival_series_csv(series, cells));

        ReturnPeriodMap rp = return_period_map(surfaces, s, cfg.rp_threshold);
        write_file(fs::path(cfg.out) / ("return_period_" + kind_name + ".csv"),
                   return_period_csv(rp, cells));
    }
    if (!any_kind)
        throw data_error("survival: no risk surface files in '" + cfg.out + "'");
    std::cout << "survival: outputs in " << cfg.out << "\n";
    return 0;
}

int run_simulate(RunConfig& cfg) {
    SyntheticConfig syn;
    syn.seed = cfg.seed;
    if (cfg.years) {
        syn.first_year = cfg.years->first;
        syn.n_years = static_cast<std::size_t>(cfg.years->second -
                                               cfg.years->first) + 1;
    }
    Synthetic out = generate_synthetic(syn);
    fs::create_directories(cfg.out);
    write_config_echo(cfg, "simulate");
    write_file(fs::path(cfg.out) / "synthetic.csv", grid_csv(out.data));
    write_file(fs::path(cfg.out) / "generator.json", yvine_json(out.generator));
    std::cout << "simulate: " << out.data.rows.size() << " records in "
              << cfg.out << "\n";
    return 0;
}

int run_eda(RunConfig& cfg) {
    GridDataset ds = load_input(cfg);
    std::vector<int> years = select_years(ds, cfg);
    fs::create_directories(cfg.out);
    write_config_echo(cfg, "eda");

    char buf[64];
    auto g17 = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };

    std::string series_csv = "year,tau\n";
    for (int year : years) {
        YearSlice slice = year_slice(ds, year);
        std::vector<NamedColumn> cols{{"frost", slice.frost},
                                      {"drought", slice.drought},
                                      {"lat", slice.lat},
                                      {"lon", slice.lon}};
        for (std::size_t k = 0; k < ds.predictor_names.size(); ++k)
            cols.push_back({ds.predictor_names[k], slice.predictors[k]});
        std::vector<std::string> names;
        for (const auto& c : cols) names.push_back(c.name);
        write_file(fs::path(cfg.out) /
                       ("tau_matrix_" + std::to_string(year) + ".csv"),
                   tau_matrix_csv(names, tau_matrix(cols)));
        series_csv += std::to_string(year) + "," +
                      g17(kendall_tau(slice.frost, slice.drought)) + "\n";
    }
    write_file(fs::path(cfg.out) / "tau_fd_series.csv", series_csv);
    std::cout << "eda: " << years.size() << " year(s) in " << cfg.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vine-copula regression risk toolkit"};
    app.require_subcommand(1);
    // config keys live under the subcommand's section, e.g. [fit] max-p=3
    app.set_config("--config", "", "INI config file");

    RunConfig cfg;
    CLI::App* fit = app.add_subcommand("fit", "fit annual models");
    CLI::App* risk = app.add_subcommand("risk", "evaluate risk surfaces");
    CLI::App* survival =
        app.add_subcommand("survival", "survival curves and return periods");
    CLI::App* simulate =
        app.add_subcommand("simulate", "generate a synthetic dataset");
    CLI::App* eda = app.add_subcommand("eda", "dependence summaries");
    add_common_options(fit, cfg, true);
    add_common_options(risk, cfg, true);
    add_common_options(survival, cfg, false);
    add_common_options(simulate, cfg, false);
    add_common_options(eda, cfg, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        resolve_config(cfg);
        if (fit->parsed()) return run_fit(cfg);
        if (risk->parsed()) return run_risk(cfg);
        if (survival->parsed()) return run_survival(cfg);
        if (simulate->parsed()) return run_simulate(cfg);
        if (eda->parsed()) return run_eda(cfg);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
