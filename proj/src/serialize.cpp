#include "vinerisk/serialize.hpp"

#include "json.hpp"

#include "vinerisk/errors.hpp"

namespace vinerisk {

namespace {

using nlohmann::json;

json pc_to_json(const PairCopula& pc) {
    return {{"family", to_token(pc.family)},
            {"theta", pc.theta},
            {"tau", pc.tau},
            {"loglik", pc.loglik},
            {"aic", pc.aic},
            {"n_obs", pc.n_obs}};
}

PairCopula pc_from_json(const json& j) {
    PairCopula pc;
    pc.family = family_from_token(j.at("family").get<std::string>());
    pc.theta = j.at("theta").get<double>();
    pc.tau = j.at("tau").get<double>();
    pc.loglik = j.at("loglik").get<double>();
    pc.aic = j.at("aic").get<double>();
    pc.n_obs = j.at("n_obs").get<std::size_t>();
    return pc;
}

json pc_array(const std::vector<PairCopula>& edges) {
    json arr = json::array();
    for (const auto& pc : edges) arr.push_back(pc_to_json(pc));
    return arr;
}

std::vector<PairCopula> pc_vector(const json& arr) {
    std::vector<PairCopula> out;
    for (const auto& j : arr) out.push_back(pc_from_json(j));
    return out;
}

json marginal_to_json(const KernelMarginal& m) {
    return {{"sample_size", m.sample_size},
            {"bandwidth", m.bandwidth},
            {"lo", m.lo},
            {"hi", m.hi},
            {"x", m.x},
            {"pdf", m.pdf},
            {"cdf", m.cdf}};
}

KernelMarginal marginal_from_json(const json& j) {
    KernelMarginal m;
    m.sample_size = j.at("sample_size").get<std::size_t>();
    m.bandwidth = j.at("bandwidth").get<double>();
    m.lo = j.at("lo").get<double>();
    m.hi = j.at("hi").get<double>();
    m.x = j.at("x").get<std::vector<double>>();
    m.pdf = j.at("pdf").get<std::vector<double>>();
    m.cdf = j.at("cdf").get<std::vector<double>>();
    if (m.x.size() != m.pdf.size() || m.x.size() != m.cdf.size() || m.x.empty())
        throw data_error("marginal grid arrays disagree in length");
    return m;
}

json dvine_to_json(const DVineModel& m) {
    json trees = json::array();
    for (const auto& tree : m.trees) trees.push_back(pc_array(tree));
    return {{"order", m.order}, {"trees", trees}, {"cll_trace", m.cll_trace}};
}

DVineModel dvine_from_json(const json& j) {
    DVineModel m;
    m.order = j.at("order").get<std::vector<std::string>>();
    for (const auto& tree : j.at("trees")) m.trees.push_back(pc_vector(tree));
    m.cll_trace = j.at("cll_trace").get<std::vector<double>>();
    return m;
}

json yvine_to_json(const YVineModel& m) {
    json trees = json::array();
    for (const auto& tree : m.predictor_trees) trees.push_back(pc_array(tree));
    return {{"order", m.order},
            {"edges_v1", pc_array(m.edges_v1)},
            {"edges_v2", pc_array(m.edges_v2)},
            {"predictor_trees", trees},
            {"top_copula", pc_to_json(m.top_copula)},
            {"cll_trace", m.cll_trace}};
}

YVineModel yvine_from(const json& j) {
    YVineModel m;
    m.order = j.at("order").get<std::vector<std::string>>();
    m.edges_v1 = pc_vector(j.at("edges_v1"));
    m.edges_v2 = pc_vector(j.at("edges_v2"));
    for (const auto& tree : j.at("predictor_trees"))
        m.predictor_trees.push_back(pc_vector(tree));
    m.top_copula = pc_from_json(j.at("top_copula"));
    m.cll_trace = j.at("cll_trace").get<std::vector<double>>();
    return m;
}

// json.hpp throws its own exception hierarchy; fold everything into the
// data_error channel with a stable prefix.
template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const error&) {
        throw;
    } catch (const std::exception& e) {
        throw data_error(std::string(what) + ": " + e.what());
    }
}

} // namespace

std::string model_set_json(const AnnualModelSet& ms) {
    json margs = json::object();
    for (const auto& [name, m] : ms.marginals)
        margs[name] = marginal_to_json(m);
    json j{{"year", ms.year},
           {"marginals", margs},
           {"dvine_frost", dvine_to_json(ms.dvine_frost)},
           {"dvine_drought", dvine_to_json(ms.dvine_drought)},
           {"yvine", yvine_to_json(ms.yvine)}};
    return j.dump(2) + "\n";
}

AnnualModelSet model_set_from_json(const std::string& text) {
    return guarded("model_set_from_json", [&] {
        json j = json::parse(text);
        AnnualModelSet ms;
        ms.year = j.at("year").get<int>();
        for (const auto& [name, mj] : j.at("marginals").items())
            ms.marginals.emplace(name, marginal_from_json(mj));
        ms.dvine_frost = dvine_from_json(j.at("dvine_frost"));
        ms.dvine_drought = dvine_from_json(j.at("dvine_drought"));
        ms.yvine = yvine_from(j.at("yvine"));
        return ms;
    });
}

std::string yvine_json(const YVineModel& m) {
    return yvine_to_json(m).dump(2) + "\n";
}

YVineModel yvine_from_json(const std::string& text) {
    return guarded("yvine_from_json", [&] {
        return yvine_from(json::parse(text));
    });
}

} // namespace vinerisk
