#include "sdergm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sdergm {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

struct EdgeRow {
    long long t;
    std::string src, dst;
};

std::vector<EdgeRow> read_edge_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    {
        const auto header = split_csv_line(line);
        if (header.size() != 3 || header[0] != "t" || header[1] != "src" || header[2] != "dst")
            throw std::runtime_error(path + ": expected header t,src,dst");
    }
    std::vector<EdgeRow> rows;
    int bad = 0, first_bad = -1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        bool ok = fields.size() == 3 && !fields[1].empty() && !fields[2].empty();
        long long t = 0;
        if (ok) {
            try {
                std::size_t pos = 0;
                t = std::stoll(fields[0], &pos);
                ok = pos == fields[0].size();
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok) {
            ++bad;
            if (first_bad < 0) first_bad = line_no;
            continue;
        }
        if (fields[1] == fields[2])
            throw std::runtime_error(path + ": self-loop at line " + std::to_string(line_no) +
                                     " (" + fields[1] + ")");
        rows.push_back({t, fields[1], fields[2]});
    }
    if (bad > 0)
        throw std::runtime_error(path + ": " + std::to_string(bad) +
                                 " malformed rows, first at line " + std::to_string(first_bad));
    if (rows.empty()) throw std::runtime_error(path + ": no edges");
    return rows;
}

}  // namespace

TemporalNetwork load_temporal_edgelist(const std::string& path, bool directed) {
    const auto rows = read_edge_rows(path);

    std::set<std::string> names;
    std::set<long long> times;
    for (const auto& row : rows) {
        names.insert(row.src);
        names.insert(row.dst);
        times.insert(row.t);
    }
    TemporalNetwork data;
    data.node_names.assign(names.begin(), names.end());
    data.times.assign(times.begin(), times.end());
    std::map<std::string, int> index;
    for (int i = 0; i < data.n_nodes(); ++i) index[data.node_names[i]] = i;
    std::map<long long, int> t_index;
    for (int t = 0; t < static_cast<int>(data.times.size()); ++t) t_index[data.times[t]] = t;

    const int n = data.n_nodes();
    if (n < 2) throw std::runtime_error(path + ": need at least 2 nodes");
    data.snapshots.assign(data.times.size(), Adjacency(n, directed));
    for (const auto& row : rows)
        data.snapshots[t_index[row.t]].set(index[row.src], index[row.dst], true);
    data.active.assign(data.times.size(), std::vector<bool>(n, true));
    data.validate();
    return data;
}

void write_temporal_edgelist(const std::string& path, const TemporalNetwork& data) {
    std::ostringstream out;
    out << "t,src,dst\n";
    for (int t = 0; t < data.n_snapshots(); ++t) {
        const Adjacency& y = data.snapshots[t];
        for (int i = 0; i < y.n(); ++i)
            for (int j = y.directed() ? 0 : i + 1; j < y.n(); ++j)
                if (i != j && y.at(i, j))
                    out << data.times[t] << ',' << data.node_names[i] << ','
                        << data.node_names[j] << '\n';
    }
    atomic_write_text(path, out.str());
}

void apply_masks_csv(TemporalNetwork& data, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"t", "node"})
        throw std::runtime_error(path + ": expected header t,node");
    std::map<std::string, int> index;
    for (int i = 0; i < data.n_nodes(); ++i) index[data.node_names[i]] = i;
    std::map<long long, int> t_index;
    for (int t = 0; t < static_cast<int>(data.times.size()); ++t) t_index[data.times[t]] = t;

    for (auto& mask : data.active) mask.assign(data.n_nodes(), false);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw std::runtime_error(path + ": malformed row at line " + std::to_string(line_no));
        const long long t = std::stoll(fields[0]);
        if (!t_index.count(t))
            throw std::runtime_error(path + ": unknown snapshot time " + fields[0]);
        if (!index.count(fields[1]))
            throw std::runtime_error(path + ": unregistered node " + fields[1]);
        data.active[t_index[t]][index[fields[1]]] = true;
    }
}

void write_masks_csv(const std::string& path, const TemporalNetwork& data) {
    std::ostringstream out;
    out << "t,node\n";
    for (int t = 0; t < data.n_snapshots(); ++t)
        for (int i = 0; i < data.n_nodes(); ++i)
            if (data.active[t][i]) out << data.times[t] << ',' << data.node_names[i] << '\n';
    atomic_write_text(path, out.str());
}

void write_node_mapping(const std::string& path, const TemporalNetwork& data) {
    std::ostringstream out;
    out << "index,node\n";
    for (int i = 0; i < data.n_nodes(); ++i) out << i << ',' << data.node_names[i] << '\n';
    atomic_write_text(path, out.str());
}

// ---------------------------------------------------------------------------

TemporalNetwork build_covoting(const std::string& votes_path, double threshold,
                               int min_common_votes) {
    std::ifstream in(votes_path);
    if (!in) throw std::runtime_error("cannot open: " + votes_path);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{"session", "member", "ballot", "vote"})
        throw std::runtime_error(votes_path + ": expected header session,member,ballot,vote");

    enum class Vote { Yea, Nay };
    // session -> member -> ballot -> vote
    std::map<long long, std::map<std::string, std::map<std::string, Vote>>> sessions;
    std::set<std::string> names;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw std::runtime_error(votes_path + ": malformed row at line " +
                                     std::to_string(line_no));
        long long session = 0;
        try {
            session = std::stoll(fields[0]);
        } catch (const std::exception&) {
            throw std::runtime_error(votes_path + ": bad session id at line " +
                                     std::to_string(line_no));
        }
        const std::string& vote = fields[3];
        if (vote == "absent") continue;  // absences carry no information
        if (vote != "yea" && vote != "nay")
            throw std::runtime_error(votes_path + ": unknown vote code '" + vote + "' at line " +
                                     std::to_string(line_no));
        sessions[session][fields[1]][fields[2]] = vote == "yea" ? Vote::Yea : Vote::Nay;
        names.insert(fields[1]);
    }
    if (sessions.empty()) throw std::runtime_error(votes_path + ": no votes");

    TemporalNetwork data;
    data.node_names.assign(names.begin(), names.end());
    std::map<std::string, int> index;
    for (int i = 0; i < data.n_nodes(); ++i) index[data.node_names[i]] = i;
    const int n = data.n_nodes();
    if (n < 2) throw std::runtime_error(votes_path + ": need at least 2 members");

    for (const auto& [session, members] : sessions) {
        if (members.size() < 2)
            throw std::runtime_error(votes_path + ": session " + std::to_string(session) +
                                     " has fewer than 2 voting members");
        Adjacency y(n, false);
        std::vector<bool> mask(n, false);
        for (const auto& [name, votes] : members) {
            (void)votes;
            mask[index.at(name)] = true;
        }
        for (auto a = members.begin(); a != members.end(); ++a)
            for (auto b = std::next(a); b != members.end(); ++b) {
                int common = 0, agree = 0;
                for (const auto& [ballot, va] : a->second) {
                    const auto it = b->second.find(ballot);
                    if (it == b->second.end()) continue;
                    ++common;
                    if (it->second == va) ++agree;
                }
                // strict inequality: agreeing on exactly the threshold share
                // does not create a link
                if (common >= min_common_votes &&
                    static_cast<double>(agree) > threshold * common)
                    y.set(index.at(a->first), index.at(b->first), true);
            }
        data.snapshots.push_back(y);
        data.active.push_back(mask);
        data.times.push_back(session);
    }
    data.validate();
    return data;
}

// ---------------------------------------------------------------------------

void write_filter_path(const std::string& path, const FilterPath& fp,
                       const std::vector<std::string>& param_names) {
    if (static_cast<int>(param_names.size()) != fp.theta.cols())
        throw std::invalid_argument("write_filter_path: name count mismatch");
    std::ostringstream out;
    out << "t,param,value,scaled_score\n";
    for (int t = 0; t < fp.theta.rows(); ++t)
        for (int s = 0; s < fp.theta.cols(); ++s)
            out << (t + 1) << ',' << param_names[s] << ',' << format_double(fp.theta(t, s)) << ','
                << format_double(fp.scaled_scores(t, s)) << '\n';
    atomic_write_text(path, out.str());
}

std::vector<std::string> beta_param_names(const std::vector<std::string>& node_names) {
    std::vector<std::string> names;
    names.reserve(2 * node_names.size());
    for (const auto& n : node_names) names.push_back("in_" + n);
    for (const auto& n : node_names) names.push_back("out_" + n);
    return names;
}

std::vector<std::string> ergm_param_names(const ErgmSpec& spec) {
    std::vector<std::string> names;
    names.reserve(spec.stats.size());
    for (const auto& k : spec.stats) names.push_back(statistic_name(k));
    return names;
}

// ---------------------------------------------------------------------------

void require_keys(const json& j, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional, const std::string& context) {
    if (!j.is_object()) throw std::runtime_error(context + ": expected a JSON object");
    for (const auto& key : required)
        if (!j.contains(key)) throw std::runtime_error(context + ": missing key '" + key + "'");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(required.begin(), required.end(), key) == required.end() &&
            std::find(optional.begin(), optional.end(), key) == optional.end())
            throw std::runtime_error(context + ": unknown key '" + key + "'");
    }
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vec_from_json(const json& j, const std::string& context) {
    if (!j.is_array()) throw std::runtime_error(context + ": expected an array");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

}  // namespace

json ergm_spec_to_json(const ErgmSpec& spec) {
    json stats = json::array();
    for (const auto& kind : spec.stats) {
        if (std::holds_alternative<EdgesStat>(kind)) {
            stats.push_back({{"kind", "edges"}});
        } else if (const auto* g = std::get_if<GwespStat>(&kind)) {
            stats.push_back({{"kind", "gwesp"}, {"decay", g->decay}});
        } else if (const auto* o = std::get_if<OutDegreeStat>(&kind)) {
            stats.push_back({{"kind", "out_degree"}, {"node", o->node}});
        } else {
            stats.push_back({{"kind", "in_degree"}, {"node", std::get<InDegreeStat>(kind).node}});
        }
    }
    return {{"type", "ergm"}, {"directed", spec.directed}, {"stats", stats}};
}

ErgmSpec ergm_spec_from_json(const json& j) {
    require_keys(j, {"type", "directed", "stats"}, {}, "model");
    if (j.at("type").get<std::string>() != "ergm")
        throw std::runtime_error("model: expected type 'ergm'");
    std::vector<StatisticKind> stats;
    for (const auto& s : j.at("stats")) {
        const std::string kind = s.at("kind").get<std::string>();
        if (kind == "edges") {
            require_keys(s, {"kind"}, {}, "model.stats");
            stats.push_back(EdgesStat{});
        } else if (kind == "gwesp") {
            require_keys(s, {"kind"}, {"decay"}, "model.stats");
            stats.push_back(GwespStat{s.value("decay", 0.5)});
        } else if (kind == "out_degree") {
            require_keys(s, {"kind", "node"}, {}, "model.stats");
            stats.push_back(OutDegreeStat{s.at("node").get<int>()});
        } else if (kind == "in_degree") {
            require_keys(s, {"kind", "node"}, {}, "model.stats");
            stats.push_back(InDegreeStat{s.at("node").get<int>()});
        } else {
            throw std::runtime_error("model: unknown statistic kind '" + kind + "'");
        }
    }
    return ErgmSpec(std::move(stats), j.at("directed").get<bool>());
}

json dgp_to_json(const DgpSpec& spec) {
    const char* kind = "const";
    switch (spec.kind) {
        case DgpKind::Const: kind = "const"; break;
        case DgpKind::Steps: kind = "steps"; break;
        case DgpKind::Sine: kind = "sine"; break;
        case DgpKind::Ar1: kind = "ar1"; break;
    }
    json varying = json::array();
    for (bool v : spec.varying) varying.push_back(v);
    return {{"kind", kind},
            {"theta0", vec_to_json(spec.theta0)},
            {"theta1", vec_to_json(spec.theta1)},
            {"theta2", vec_to_json(spec.theta2)},
            {"varying", varying},
            {"phases", vec_to_json(spec.phases)},
            {"ar_coeff", spec.ar_coeff},
            {"ar_sigma", spec.ar_sigma},
            {"horizon", spec.horizon},
            {"seed", spec.seed}};
}

DgpSpec dgp_from_json(const json& j) {
    require_keys(j, {"kind", "theta0", "horizon"},
                 {"theta1", "theta2", "varying", "phases", "ar_coeff", "ar_sigma", "seed"},
                 "dgp");
    DgpSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "const")
        spec.kind = DgpKind::Const;
    else if (kind == "steps")
        spec.kind = DgpKind::Steps;
    else if (kind == "sine")
        spec.kind = DgpKind::Sine;
    else if (kind == "ar1")
        spec.kind = DgpKind::Ar1;
    else
        throw std::runtime_error("dgp: unknown kind '" + kind + "'");
    spec.theta0 = vec_from_json(j.at("theta0"), "dgp.theta0");
    const int k = static_cast<int>(spec.theta0.size());
    spec.theta1 = j.contains("theta1") ? vec_from_json(j.at("theta1"), "dgp.theta1") : spec.theta0;
    spec.theta2 = j.contains("theta2") ? vec_from_json(j.at("theta2"), "dgp.theta2") : spec.theta0;
    if (j.contains("varying")) {
        spec.varying.clear();
        for (const auto& v : j.at("varying")) spec.varying.push_back(v.get<bool>());
    } else {
        spec.varying = default_varying_mask(k);
    }
    spec.phases = j.contains("phases") ? vec_from_json(j.at("phases"), "dgp.phases")
                                       : Eigen::VectorXd::Zero(k);
    spec.ar_coeff = j.value("ar_coeff", 0.99);
    spec.ar_sigma = j.value("ar_sigma", 0.1);
    spec.horizon = j.at("horizon").get<int>();
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.validate();
    return spec;
}

json sd_params_to_json(const SdStaticParams& params) {
    return {{"w", vec_to_json(params.w)},
            {"alpha", vec_to_json(params.alpha)},
            {"beta", vec_to_json(params.beta)},
            {"pooling", params.pooling == Pooling::PooledByDirection ? "pooled_by_direction"
                                                                     : "per_parameter"}};
}

SdStaticParams sd_params_from_json(const json& j) {
    require_keys(j, {"w", "alpha", "beta", "pooling"}, {}, "sd_params");
    SdStaticParams p;
    p.w = vec_from_json(j.at("w"), "sd_params.w");
    p.alpha = vec_from_json(j.at("alpha"), "sd_params.alpha");
    p.beta = vec_from_json(j.at("beta"), "sd_params.beta");
    const std::string pooling = j.at("pooling").get<std::string>();
    if (pooling == "per_parameter")
        p.pooling = Pooling::PerParameter;
    else if (pooling == "pooled_by_direction")
        p.pooling = Pooling::PooledByDirection;
    else
        throw std::runtime_error("sd_params: unknown pooling '" + pooling + "'");
    return p;
}

json filter_experiment_to_json(const FilterExperimentReport& r) {
    json varying = json::array();
    for (bool v : r.varying) varying.push_back(v);
    return {{"dgp", r.dgp},
            {"replicas", r.replicas},
            {"seed", r.seed},
            {"horizon", r.horizon},
            {"varying", varying},
            {"sd_rmse", r.sd_rmse},
            {"cross_rmse", r.cross_rmse},
            {"static_rmse", r.static_rmse},
            {"sd_rmse_conventional", r.sd_rmse_conv},
            {"cross_rmse_conventional", r.cross_rmse_conv},
            {"static_rmse_conventional", r.static_rmse_conv},
            {"sd_rmse_by_param", vec_to_json(r.sd_rmse_by_param)},
            {"cross_rmse_by_param", vec_to_json(r.cross_rmse_by_param)},
            {"static_rmse_by_param", vec_to_json(r.static_rmse_by_param)},
            {"sd_per_replica", r.sd_per_replica},
            {"cross_per_replica", r.cross_per_replica},
            {"static_per_replica", r.static_per_replica}};
}

json lm_experiment_to_json(const LmExperimentReport& r) {
    return {{"replicas", r.replicas},
            {"seed", r.seed},
            {"level", r.level},
            {"rejection_rate", vec_to_json(r.rejection_rate)},
            {"p_values", r.p_values}};
}

json forecast_experiment_to_json(const ForecastExperimentReport& r) {
    return {{"window", r.window},
            {"max_horizon", r.max_horizon},
            {"n_sims", r.n_sims},
            {"seed", r.seed},
            {"n_rolls", r.n_rolls},
            {"scored_dyads", r.scored_dyads},
            {"sd_auc", r.sd_auc},
            {"naive_auc", r.naive_auc},
            {"ar1_auc", r.ar1_auc}};
}

json sparse_dense_to_json(const SparseDenseReport& r) {
    return {{"regime", r.dense ? "dense" : "sparse"},
            {"replicas", r.replicas},
            {"seed", r.seed},
            {"horizon", r.horizon},
            {"n_values", r.n_values},
            {"sd_rmse", r.sd_rmse},
            {"cross_rmse", r.cross_rmse},
            {"density", r.density}};
}

}  // namespace sdergm
