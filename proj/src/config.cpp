#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "votefusion/errors.hpp"
#include "votefusion/experiment.hpp"

namespace votefusion {

namespace {

using nlohmann::json;

// A JSON value together with its pointer, for error messages.
struct Node {
    const json& value;
    std::string path;

    Node at(const std::string& key) const {
        if (!value.contains(key)) throw ConfigError(path + "/" + key, "missing required field");
        return {value.at(key), path + "/" + key};
    }
    Node at(std::size_t i) const { return {value.at(i), path + "/" + std::to_string(i)}; }
    bool has(const std::string& key) const { return value.contains(key); }

    void require_object(std::initializer_list<const char*> allowed) const {
        if (!value.is_object()) throw ConfigError(path, "expected an object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : value.items()) {
            if (!ok.count(k)) throw ConfigError(path + "/" + k, "unknown field");
        }
    }
    const json& array() const {
        if (!value.is_array()) throw ConfigError(path, "expected an array");
        return value;
    }
    double number() const {
        if (!value.is_number()) throw ConfigError(path, "expected a number");
        return value.get<double>();
    }
    std::int64_t integer() const {
        if (!value.is_number_integer()) throw ConfigError(path, "expected an integer");
        return value.get<std::int64_t>();
    }
    std::uint64_t unsigned_integer() const {
        if (value.is_number_unsigned()) return value.get<std::uint64_t>();
        if (value.is_number_integer() && value.get<std::int64_t>() >= 0) return value.get<std::uint64_t>();
        throw ConfigError(path, "expected a non-negative integer");
    }
    std::string string() const {
        if (!value.is_string()) throw ConfigError(path, "expected a string");
        return value.get<std::string>();
    }
};

// Runs f, turning library argument errors into ConfigError at `path`.
template <class F>
auto guarded(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ArgumentError& e) {
        throw ConfigError(path, e.what());
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
}

LikelihoodModel parse_agent(const Node& n) {
    if (!n.value.is_object()) throw ConfigError(n.path, "expected an object");
    const auto model = n.at("model").string();
    if (model == "gaussian") {
        n.require_object({"model", "variance"});
        double v = n.at("variance").number();
        return guarded(n.path + "/variance", [&] { return LikelihoodModel::gaussian(v); });
    }
    if (model == "exponential") {
        n.require_object({"model", "rate0", "rate1"});
        double r0 = n.at("rate0").number();
        double r1 = n.at("rate1").number();
        return guarded(n.path, [&] { return LikelihoodModel::exponential(r0, r1); });
    }
    throw ConfigError(n.path + "/model", "unknown model '" + model + "' (expected gaussian or exponential)");
}

std::vector<int> parse_int_list(const Node& n) {
    std::vector<int> out;
    for (std::size_t i = 0; i < n.array().size(); ++i) out.push_back(static_cast<int>(n.at(i).integer()));
    return out;
}

std::vector<double> parse_sweep(const Node& n) {
    if (n.has("weights")) {
        n.require_object({"weights"});
        std::vector<double> w;
        auto list = n.at("weights");
        for (std::size_t i = 0; i < list.array().size(); ++i) {
            double x = list.at(i).number();
            if (!(x > 0.0)) throw ConfigError(list.path + "/" + std::to_string(i), "weights must be positive");
            w.push_back(x);
        }
        if (w.empty()) throw ConfigError(list.path, "need at least one weight");
        return w;
    }
    n.require_object({"lo", "hi", "count"});
    double lo = n.has("lo") ? n.at("lo").number() : 1e-3;
    double hi = n.has("hi") ? n.at("hi").number() : 1e3;
    int count = n.has("count") ? static_cast<int>(n.at("count").integer()) : 41;
    return guarded(n.path, [&] { return log_spaced_weights(lo, hi, count); });
}

std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ArgumentError("unknown output format '" + name + "' (expected csv or json)");
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(line_column(text, e.byte), "invalid JSON");
    }
    Node root{doc, ""};
    root.require_object({"schema_version", "prior", "costs", "agents", "fusion", "mode", "ordering",
                         "observation_graph", "sweep", "mc", "output", "solver"});
    if (root.at("schema_version").integer() != kSchemaVersion) {
        throw ConfigError("/schema_version", "unsupported version (this build reads " + std::to_string(kSchemaVersion) + ")");
    }

    ExperimentConfig cfg;
    {
        auto p = root.at("prior");
        p.require_object({"p0"});
        double p0 = p.at("p0").number();
        if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("/prior/p0", "must lie strictly between 0 and 1");
        cfg.prior = Prior(p0);
    }
    if (root.has("costs")) {
        auto c = root.at("costs");
        c.require_object({"c10", "c01"});
        double c10 = c.at("c10").number();
        double c01 = c.at("c01").number();
        cfg.costs = guarded("/costs", [&] { return CostModel(c10, c01); });
    }
    {
        auto a = root.at("agents");
        for (std::size_t i = 0; i < a.array().size(); ++i) cfg.agents.push_back(parse_agent(a.at(i)));
    }
    {
        auto f = root.at("fusion");
        f.require_object({"L", "N"});
        auto L = f.at("L").integer();
        auto N = f.at("N").integer();
        if (N < 1 || N > 20) throw ConfigError("/fusion/N", "must be between 1 and 20");
        if (L < 1 || L > N) throw ConfigError("/fusion/L", "must be between 1 and N");
        cfg.rule = FusionRule(static_cast<int>(L), static_cast<int>(N));
        if (static_cast<std::int64_t>(cfg.agents.size()) != N) {
            throw ConfigError("/agents", "has " + std::to_string(cfg.agents.size()) + " entries but fusion N is " +
                                             std::to_string(N));
        }
    }
    cfg.mode = guarded("/mode", [&] { return parse_mode(root.at("mode").string()); });

    if (root.has("ordering")) {
        auto o = root.at("ordering");
        if (o.value.is_string()) {
            if (o.string() != "search") throw ConfigError("/ordering", "expected a list of agents or \"search\"");
            if (cfg.mode != VotingMode::full_public) throw ConfigError("/ordering", "search needs mode public");
            cfg.search_ordering = true;
        } else {
            auto list = parse_int_list(o);
            cfg.ordering = guarded("/ordering", [&] { return normalize_ordering(list, cfg.rule.N()); });
        }
    }
    if (root.has("observation_graph")) {
        auto g = root.at("observation_graph");
        std::vector<std::vector<int>> lists;
        for (std::size_t i = 0; i < g.array().size(); ++i) lists.push_back(parse_int_list(g.at(i)));
        if (static_cast<int>(lists.size()) != cfg.rule.N()) {
            throw ConfigError("/observation_graph", "needs one list per position");
        }
        cfg.graph = guarded("/observation_graph", [&] { return ObservationGraph(lists); });
    }
    if (cfg.mode == VotingMode::partial_public && !cfg.graph) {
        throw ConfigError("/observation_graph", "required when mode is partial");
    }
    if (root.has("sweep")) cfg.sweep = parse_sweep(root.at("sweep"));
    if (root.has("mc")) {
        auto m = root.at("mc");
        m.require_object({"trials", "seed"});
        McSpec mc;
        if (m.has("trials")) mc.trials = m.at("trials").unsigned_integer();
        if (m.has("seed")) mc.seed = m.at("seed").unsigned_integer();
        if (mc.trials == 0) throw ConfigError("/mc/trials", "must be at least 1");
        cfg.mc = mc;
    }
    if (root.has("output")) {
        auto o = root.at("output");
        o.require_object({"directory", "format"});
        if (o.has("directory")) cfg.out_dir = o.at("directory").string();
        if (o.has("format")) cfg.format = guarded("/output/format", [&] { return parse_format(o.at("format").string()); });
    }
    if (root.has("solver")) {
        auto s = root.at("solver");
        s.require_object({"tolerance", "max_sweeps", "grid_points"});
        if (s.has("tolerance")) cfg.solver.tolerance = s.at("tolerance").number();
        if (s.has("max_sweeps")) cfg.solver.max_sweeps = static_cast<int>(s.at("max_sweeps").integer());
        if (s.has("grid_points")) cfg.solver.grid_points = static_cast<int>(s.at("grid_points").integer());
        if (!(cfg.solver.tolerance > 0.0)) throw ConfigError("/solver/tolerance", "must be positive");
        if (cfg.solver.max_sweeps < 1) throw ConfigError("/solver/max_sweeps", "must be at least 1");
        if (cfg.solver.grid_points < 2) throw ConfigError("/solver/grid_points", "must be at least 2");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace votefusion
