// Command-line front end: simulation, fitting, filtering, testing,
// forecasting and the named experiment pipelines.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "sdergm/dgp.hpp"
#include "sdergm/eval.hpp"
#include "sdergm/io.hpp"
#include "sdergm/rng.hpp"
#include "sdergm/sd_filter.hpp"

using nlohmann::json;
using namespace sdergm;

namespace {

constexpr int kSchemaVersion = 1;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    json j;
    in >> j;
    return j;
}

void write_json(const std::string& path, json j) {
    j["schema_version"] = kSchemaVersion;
    atomic_write_text(path, j.dump(2) + "\n");
}

struct ModelConfig {
    bool is_beta = true;
    ErgmSpec spec;  // ergm only
    json resolved;
};

ModelConfig load_model(const std::string& path) {
    const json j = load_json(path);
    ModelConfig model;
    model.resolved = j;
    if (!j.contains("type")) throw std::runtime_error("model: missing key 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "beta") {
        require_keys(j, {"type"}, {}, "model");
        model.is_beta = true;
    } else if (type == "ergm") {
        model.is_beta = false;
        model.spec = ergm_spec_from_json(j);
    } else {
        throw std::runtime_error("model: unknown type '" + type + "'");
    }
    return model;
}

TemporalNetwork load_data(const ModelConfig& model, const std::string& data_path,
                          const std::string& masks_path) {
    const bool directed = model.is_beta ? true : model.spec.directed;
    TemporalNetwork data = load_temporal_edgelist(data_path, directed);
    if (!masks_path.empty()) apply_masks_csv(data, masks_path);
    return data;
}

std::unique_ptr<ModelBackend> make_backend(const ModelConfig& model, TemporalNetwork data) {
    if (model.is_beta) return std::make_unique<BetaBackend>(std::move(data));
    return std::make_unique<ErgmBackend>(model.spec, std::move(data));
}

std::vector<std::string> param_names(const ModelConfig& model, const TemporalNetwork& data) {
    return model.is_beta ? beta_param_names(data.node_names) : ergm_param_names(model.spec);
}

// dgp config: either a fully explicit DgpSpec or a builder form that
// derives the beta-model parameter vectors from degree targets
DgpKind parse_dgp_kind(const std::string& s) {
    if (s == "const") return DgpKind::Const;
    if (s == "steps") return DgpKind::Steps;
    if (s == "sin" || s == "sine") return DgpKind::Sine;
    if (s == "ar1") return DgpKind::Ar1;
    throw std::runtime_error("unknown dgp kind '" + s + "' (const|steps|sin|ar1)");
}

DgpSpec load_dgp(const json& j, std::uint64_t seed) {
    if (j.contains("builder")) {
        require_keys(j, {"builder", "kind", "n", "horizon"}, {"d_min", "d_max"}, "dgp");
        if (j.at("builder").get<std::string>() != "beta")
            throw std::runtime_error("dgp: unknown builder '" +
                                     j.at("builder").get<std::string>() + "'");
        return make_beta_dgp(parse_dgp_kind(j.at("kind").get<std::string>()),
                             j.at("n").get<int>(), j.value("d_min", 3), j.value("d_max", 8),
                             j.at("horizon").get<int>(), seed);
    }
    DgpSpec spec = dgp_from_json(j);
    spec.seed = seed;
    return spec;
}

Pooling parse_pooling(const std::string& s) {
    if (s == "per-parameter") return Pooling::PerParameter;
    if (s == "pooled") return Pooling::PooledByDirection;
    throw std::runtime_error("unknown pooling '" + s + "' (per-parameter|pooled)");
}

int resolve_threads(int threads) {
    if (const char* env = std::getenv("SDERGM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) threads = std::min(threads <= 0 ? cap : threads, cap);
    }
    return threads <= 0 ? 1 : threads;
}

json params_file_to_json(const EstimateResult& est, const json& model_json, const json& extra) {
    json out = {{"sd_params", sd_params_to_json(est.params)},
                {"theta_static", json::array()},
                {"loglik", est.loglik},
                {"model", model_json},
                {"config", extra}};
    for (int i = 0; i < est.theta_static.size(); ++i)
        out["theta_static"].push_back(est.theta_static[i]);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"score-driven exponential random graph toolkit"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic temporal network");
    std::string sim_dgp_path, sim_model_path, sim_out_edges, sim_out_paths;
    std::uint64_t sim_seed = 0;
    int sim_nodes = 0;
    sim_cmd->add_option("--dgp", sim_dgp_path, "dgp config JSON")->required();
    sim_cmd->add_option("--model", sim_model_path, "model JSON (default: beta)");
    sim_cmd->add_option("--nodes", sim_nodes, "node count (ergm model only)");
    sim_cmd->add_option("--seed", sim_seed, "RNG seed")->required();
    sim_cmd->add_option("--out-edges", sim_out_edges, "output edge list CSV")->required();
    sim_cmd->add_option("--out-paths", sim_out_paths, "output true-path CSV")->required();

    // ---- fit-static ----
    auto* fs_cmd = app.add_subcommand("fit-static", "full-sample static fit");
    std::string fs_data, fs_masks, fs_model, fs_out;
    fs_cmd->add_option("--data", fs_data, "edge list CSV")->required();
    fs_cmd->add_option("--masks", fs_masks, "active-node CSV");
    fs_cmd->add_option("--model", fs_model, "model JSON")->required();
    fs_cmd->add_option("--out", fs_out, "output JSON")->required();

    // ---- fit-sd ----
    auto* sd_cmd = app.add_subcommand("fit-sd", "estimate the score-driven parameters");
    std::string sd_data, sd_masks, sd_model, sd_out, sd_out_csv, sd_pooling = "per-parameter";
    bool sd_no_targeting = false;
    sd_cmd->add_option("--data", sd_data, "edge list CSV")->required();
    sd_cmd->add_option("--masks", sd_masks, "active-node CSV");
    sd_cmd->add_option("--model", sd_model, "model JSON")->required();
    sd_cmd->add_option("--out", sd_out, "output JSON")->required();
    sd_cmd->add_option("--out-path", sd_out_csv, "filtered path CSV")->required();
    sd_cmd->add_option("--pooling", sd_pooling, "per-parameter|pooled (beta only)");
    sd_cmd->add_flag("--no-targeting", sd_no_targeting, "estimate w jointly");

    // ---- filter ----
    auto* fl_cmd = app.add_subcommand("filter", "run the filter with given parameters");
    std::string fl_data, fl_masks, fl_model, fl_params, fl_out_csv;
    fl_cmd->add_option("--data", fl_data, "edge list CSV")->required();
    fl_cmd->add_option("--masks", fl_masks, "active-node CSV");
    fl_cmd->add_option("--model", fl_model, "model JSON")->required();
    fl_cmd->add_option("--params", fl_params, "fitted parameter JSON")->required();
    fl_cmd->add_option("--out-path", fl_out_csv, "filtered path CSV")->required();

    // ---- test-lm ----
    auto* lm_cmd = app.add_subcommand("test-lm", "time-variation test per parameter");
    std::string lm_data, lm_masks, lm_model, lm_out;
    lm_cmd->add_option("--data", lm_data, "edge list CSV")->required();
    lm_cmd->add_option("--masks", lm_masks, "active-node CSV");
    lm_cmd->add_option("--model", lm_model, "model JSON")->required();
    lm_cmd->add_option("--out", lm_out, "output JSON")->required();

    // ---- forecast ----
    auto* fc_cmd = app.add_subcommand("forecast", "multi-horizon link forecast");
    std::string fc_data, fc_masks, fc_model, fc_params, fc_out_csv;
    int fc_horizon = 1, fc_sims = 100;
    std::uint64_t fc_seed = 0;
    fc_cmd->add_option("--data", fc_data, "edge list CSV")->required();
    fc_cmd->add_option("--masks", fc_masks, "active-node CSV");
    fc_cmd->add_option("--model", fc_model, "model JSON")->required();
    fc_cmd->add_option("--params", fc_params, "fitted parameter JSON")->required();
    fc_cmd->add_option("--horizon", fc_horizon, "steps ahead")->required();
    fc_cmd->add_option("--n-sims", fc_sims, "simulated continuations");
    fc_cmd->add_option("--seed", fc_seed, "RNG seed")->required();
    fc_cmd->add_option("--out", fc_out_csv, "per-dyad probability CSV")->required();

    // ---- covote ----
    auto* cv_cmd = app.add_subcommand("covote", "build co-voting networks from vote records");
    std::string cv_votes, cv_out_edges, cv_out_masks, cv_out_nodes;
    double cv_threshold = 0.75;
    int cv_min_common = 1;
    cv_cmd->add_option("--votes", cv_votes, "vote record CSV")->required();
    cv_cmd->add_option("--threshold", cv_threshold, "agreement threshold (strict)");
    cv_cmd->add_option("--min-common", cv_min_common, "minimum common ballots");
    cv_cmd->add_option("--out-edges", cv_out_edges, "output edge list CSV")->required();
    cv_cmd->add_option("--out-masks", cv_out_masks, "output active-node CSV")->required();
    cv_cmd->add_option("--out-nodes", cv_out_nodes, "output node mapping CSV");

    // ---- experiment ----
    auto* ex_cmd = app.add_subcommand("experiment", "named evaluation pipelines");
    std::string ex_name, ex_dgp = "sin", ex_regime = "sparse", ex_out, ex_data_path;
    int ex_replicas = 20, ex_nodes = 10, ex_horizon = 0, ex_threads = 1;
    int ex_window = 100, ex_max_horizon = 8, ex_sims = 100;
    double ex_level = 0.05;
    std::string ex_nodes_list = "20,50,100";
    std::uint64_t ex_seed = 0;
    bool ex_static_edges = false, ex_static_gwesp = false;
    ex_cmd->add_option("name", ex_name, "table1|table2|lm-power|lm-size|forecast|sparse-dense")
        ->required();
    ex_cmd->add_option("--dgp", ex_dgp, "const|steps|sin|ar1");
    ex_cmd->add_option("--replicas", ex_replicas, "Monte Carlo replicas");
    ex_cmd->add_option("--nodes", ex_nodes, "network size");
    ex_cmd->add_option("--horizon", ex_horizon, "snapshots per series");
    ex_cmd->add_option("--seed", ex_seed, "RNG seed")->required();
    ex_cmd->add_option("--out", ex_out, "report JSON")->required();
    ex_cmd->add_option("--threads", ex_threads, "worker cap");
    ex_cmd->add_option("--regime", ex_regime, "sparse|dense (sparse-dense)");
    ex_cmd->add_option("--nodes-list", ex_nodes_list, "comma list of N (sparse-dense)");
    ex_cmd->add_option("--level", ex_level, "test level (lm experiments)");
    ex_cmd->add_option("--window", ex_window, "rolling window (forecast)");
    ex_cmd->add_option("--max-horizon", ex_max_horizon, "max steps ahead (forecast)");
    ex_cmd->add_option("--n-sims", ex_sims, "simulated continuations (forecast)");
    ex_cmd->add_option("--data", ex_data_path, "edge list CSV (forecast; default synthetic)");
    ex_cmd->add_flag("--static-edges", ex_static_edges, "pin the edges parameter (table2/lm)");
    ex_cmd->add_flag("--static-gwesp", ex_static_gwesp, "pin the gwesp parameter (table2/lm)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim_cmd) {
            const json dgp_json = load_json(sim_dgp_path);
            const DgpSpec dgp = load_dgp(dgp_json, sim_seed);
            SimulatorSpec sim = BetaSimulator{};
            json model_json = {{"type", "beta"}};
            if (!sim_model_path.empty()) {
                const ModelConfig model = load_model(sim_model_path);
                model_json = model.resolved;
                if (!model.is_beta) {
                    if (sim_nodes < 2)
                        throw std::runtime_error("simulate: --nodes required for an ergm model");
                    ErgmSimulator es;
                    es.spec = model.spec;
                    es.n_nodes = sim_nodes;
                    sim = es;
                }
            }
            const Eigen::MatrixXd paths = generate_paths(dgp);
            const TemporalNetwork data = simulate_networks(sim, paths, split_seed(sim_seed, 1));
            write_temporal_edgelist(sim_out_edges, data);

            std::ostringstream csv;
            csv << "t,param,value\n";
            const auto names = std::holds_alternative<BetaSimulator>(sim)
                                   ? beta_param_names(data.node_names)
                                   : ergm_param_names(std::get<ErgmSimulator>(sim).spec);
            for (int t = 0; t < paths.rows(); ++t)
                for (int s = 0; s < paths.cols(); ++s)
                    csv << (t + 1) << ',' << names[s] << ',' << format_double(paths(t, s)) << '\n';
            atomic_write_text(sim_out_paths, csv.str());
            write_json(sim_out_edges + ".run.json", {{"command", "simulate"},
                                                     {"dgp", dgp_to_json(dgp)},
                                                     {"model", model_json},
                                                     {"seed", sim_seed}});

        } else if (*fs_cmd) {
            const ModelConfig model = load_model(fs_model);
            const TemporalNetwork data = load_data(model, fs_data, fs_masks);
            const auto backend = make_backend(model, data);
            const Eigen::VectorXd theta = backend->static_fit();
            json out = {{"command", "fit-static"},
                        {"model", model.resolved},
                        {"params", json::array()},
                        {"param_names", param_names(model, data)},
                        {"config", {{"data", fs_data}, {"masks", fs_masks}}}};
            for (int i = 0; i < theta.size(); ++i) out["params"].push_back(theta[i]);
            write_json(fs_out, out);

        } else if (*sd_cmd) {
            const ModelConfig model = load_model(sd_model);
            const TemporalNetwork data = load_data(model, sd_data, sd_masks);
            const auto backend = make_backend(model, data);
            EstimateConfig config;
            config.targeting = !sd_no_targeting;
            config.pooling = parse_pooling(sd_pooling);
            const EstimateResult est = estimate_static(*backend, config);
            const json extra = {{"data", sd_data},
                                {"masks", sd_masks},
                                {"pooling", sd_pooling},
                                {"targeting", !sd_no_targeting}};
            write_json(sd_out, params_file_to_json(est, model.resolved, extra));
            write_filter_path(sd_out_csv, est.path, param_names(model, data));

        } else if (*fl_cmd) {
            const ModelConfig model = load_model(fl_model);
            const TemporalNetwork data = load_data(model, fl_data, fl_masks);
            const auto backend = make_backend(model, data);
            const json pj = load_json(fl_params);
            const SdStaticParams params = sd_params_from_json(pj.at("sd_params"));
            Eigen::VectorXd theta_init;
            if (pj.contains("theta_static")) {
                theta_init.resize(pj.at("theta_static").size());
                for (std::size_t i = 0; i < pj.at("theta_static").size(); ++i)
                    theta_init[i] = pj.at("theta_static")[i].get<double>();
            } else {
                theta_init = backend->static_fit();
            }
            const FilterPath path = filter(*backend, params, theta_init);
            write_filter_path(fl_out_csv, path, param_names(model, data));

        } else if (*lm_cmd) {
            const ModelConfig model = load_model(lm_model);
            const TemporalNetwork data = load_data(model, lm_data, lm_masks);
            const auto backend = make_backend(model, data);
            const Eigen::VectorXd theta_static = backend->static_fit();
            const auto names = param_names(model, data);
            json tests = json::array();
            for (int s = 0; s < backend->n_params(); ++s) {
                const LmTestResult r = lm_test_at(*backend, theta_static, s);
                tests.push_back(
                    {{"param", names[s]}, {"statistic", r.statistic}, {"p_value", r.p_value}});
            }
            write_json(lm_out, {{"command", "test-lm"},
                                {"model", model.resolved},
                                {"tests", tests},
                                {"config", {{"data", lm_data}, {"masks", lm_masks}}}});

        } else if (*fc_cmd) {
            const ModelConfig model = load_model(fc_model);
            const TemporalNetwork data = load_data(model, fc_data, fc_masks);
            const auto backend = make_backend(model, data);
            const json pj = load_json(fc_params);
            const SdStaticParams params = sd_params_from_json(pj.at("sd_params"));
            Eigen::VectorXd theta_init;
            if (pj.contains("theta_static")) {
                theta_init.resize(pj.at("theta_static").size());
                for (std::size_t i = 0; i < pj.at("theta_static").size(); ++i)
                    theta_init[i] = pj.at("theta_static")[i].get<double>();
            } else {
                theta_init = backend->static_fit();
            }
            const FilterPath path = filter(*backend, params, theta_init);
            const auto probs = forecast(*backend, params, path.theta.row(path.theta.rows() - 1),
                                        fc_horizon, fc_sims, fc_seed);
            std::ostringstream csv;
            csv << "horizon,src,dst,prob\n";
            for (int h = 1; h <= fc_horizon; ++h) {
                const Eigen::MatrixXd& m = probs[h - 1];
                for (int i = 0; i < m.rows(); ++i)
                    for (int j = data.directed() ? 0 : i + 1; j < m.cols(); ++j)
                        if (i != j)
                            csv << h << ',' << data.node_names[i] << ',' << data.node_names[j]
                                << ',' << format_double(m(i, j)) << '\n';
            }
            atomic_write_text(fc_out_csv, csv.str());
            write_json(fc_out_csv + ".run.json", {{"command", "forecast"},
                                                  {"model", model.resolved},
                                                  {"horizon", fc_horizon},
                                                  {"n_sims", fc_sims},
                                                  {"seed", fc_seed}});

        } else if (*cv_cmd) {
            const TemporalNetwork data = build_covoting(cv_votes, cv_threshold, cv_min_common);
            write_temporal_edgelist(cv_out_edges, data);
            write_masks_csv(cv_out_masks, data);
            if (!cv_out_nodes.empty()) write_node_mapping(cv_out_nodes, data);
            write_json(cv_out_edges + ".run.json", {{"command", "covote"},
                                                    {"threshold", cv_threshold},
                                                    {"min_common_votes", cv_min_common}});

        } else if (*ex_cmd) {
            ExperimentOptions options;
            options.threads = resolve_threads(ex_threads);
            json report;
            if (ex_name == "table1") {
                if (ex_horizon == 0) ex_horizon = 250;
                options.pooling = Pooling::PooledByDirection;
                const DgpSpec dgp = make_beta_dgp(parse_dgp_kind(ex_dgp), ex_nodes, 3,
                                                  std::min(8, ex_nodes - 2), ex_horizon, ex_seed);
                report = filter_experiment_to_json(run_filter_experiment(
                    dgp, BetaSimulator{}, options, ex_replicas, ex_seed));
                report["name"] = "table1";
                report["nodes"] = ex_nodes;
            } else if (ex_name == "table2") {
                if (ex_horizon == 0) ex_horizon = 100;
                options.pooling = Pooling::PerParameter;
                const DgpSpec dgp = make_edges_gwesp_dgp(parse_dgp_kind(ex_dgp), ex_horizon,
                                                         ex_seed, !ex_static_edges,
                                                         !ex_static_gwesp);
                report = filter_experiment_to_json(run_filter_experiment(
                    dgp, make_edges_gwesp_simulator(ex_nodes), options, ex_replicas, ex_seed));
                report["name"] = "table2";
                report["nodes"] = ex_nodes;
            } else if (ex_name == "lm-power" || ex_name == "lm-size") {
                if (ex_horizon == 0) ex_horizon = 100;
                const DgpKind kind =
                    ex_name == "lm-size" ? DgpKind::Const : parse_dgp_kind(ex_dgp);
                const DgpSpec dgp = make_edges_gwesp_dgp(kind, ex_horizon, ex_seed,
                                                         !ex_static_edges, !ex_static_gwesp);
                report = lm_experiment_to_json(run_lm_experiment(
                    dgp, make_edges_gwesp_simulator(ex_nodes), ex_level, options, ex_replicas,
                    ex_seed));
                report["name"] = ex_name;
                report["nodes"] = ex_nodes;
                report["param_names"] = {"edges", "gwesp(0.5)"};
            } else if (ex_name == "forecast") {
                options.pooling = Pooling::PooledByDirection;
                TemporalNetwork data;
                if (!ex_data_path.empty()) {
                    data = load_temporal_edgelist(ex_data_path, true);
                } else {
                    // synthetic score-driven interbank analog
                    if (ex_horizon == 0) ex_horizon = ex_window + ex_max_horizon + 52;
                    const BetaParams theta0 = build_theta0_beta(ex_nodes, 3,
                                                                std::min(8, ex_nodes - 2));
                    SdStaticParams gen;
                    gen.pooling = Pooling::PooledByDirection;
                    gen.alpha = Eigen::Vector2d(0.15, 0.15);
                    gen.beta = Eigen::Vector2d(0.98, 0.98);
                    gen.w = target_w(Eigen::VectorXd::Constant(2 * ex_nodes, 0.98),
                                     theta0.stacked());
                    data = simulate_sd_process(BetaSimulator{}, gen, theta0.stacked(),
                                               ex_horizon, split_seed(ex_seed, 77));
                }
                report = forecast_experiment_to_json(run_forecast_experiment(
                    data, ex_window, ex_max_horizon, ex_sims, options, ex_seed));
                report["name"] = "forecast";
            } else if (ex_name == "sparse-dense") {
                if (ex_horizon == 0) ex_horizon = 200;
                options.pooling = Pooling::PooledByDirection;
                std::vector<int> n_list;
                std::stringstream ss(ex_nodes_list);
                for (std::string item; std::getline(ss, item, ',');)
                    n_list.push_back(std::stoi(item));
                report = sparse_dense_to_json(run_sparse_dense_experiment(
                    n_list, ex_regime == "dense", ex_horizon, options, ex_replicas, ex_seed));
                report["name"] = "sparse-dense";
            } else {
                throw std::runtime_error("unknown experiment '" + ex_name + "'");
            }
            report["threads"] = options.threads;
            write_json(ex_out, report);
        }
    } catch (const std::exception& err) {
        std::cerr << json{{"error", err.what()}}.dump() << std::endl;
        return 1;
    }
    return 0;
}
