#include "mpotrace/cli/config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mpotrace::cli {

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
        const auto m = node.Mark();
        if(m.is_null()) throw ConfigError(fmt::format("{}: {}", source_, msg));
        throw ConfigError(fmt::format("{}:{}:{}: {}", source_, m.line + 1, m.column + 1, msg));
    }

    void only_keys(const YAML::Node& map, std::initializer_list<const char*> keys, const std::string& where) const {
        if(!map.IsMap()) fail(map, where + " must be a mapping");
        for(const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if(std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
                fail(kv.first, fmt::format("unknown key '{}' in {}", key, where));
        }
    }

    template<typename T>
    T scalar(const YAML::Node& node, const std::string& field) const {
        if(!node.IsScalar()) fail(node, field + " must be a scalar");
        try {
            return node.as<T>();
        } catch(const YAML::Exception&) {
            fail(node, fmt::format("{} has an invalid value '{}'", field, node.Scalar()));
        }
    }

    // Accepts a scalar or a sequence of scalars.
    template<typename T>
    std::vector<T> list(const YAML::Node& node, const std::string& field) const {
        std::vector<T> out;
        if(node.IsSequence()) {
            for(const auto& item : node) out.push_back(scalar<T>(item, field));
        } else {
            out.push_back(scalar<T>(node, field));
        }
        return out;
    }

private:
    std::string source_;
};

thermal::Symmetry parse_symmetry(const std::string& s) {
    if(s == "none") return thermal::Symmetry::none;
    if(s == "spin_flip" || s == "spin-flip") return thermal::Symmetry::spin_flip;
    throw ConfigError("unknown correlator symmetry '" + s + "' (expected none or spin_flip)");
}

models::Family parse_family(const std::string& s) {
    if(s == "ising") return models::Family::ising;
    if(s == "lmg") return models::Family::lmg;
    throw ConfigError("unknown model family '" + s + "' (expected ising or lmg)");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for(unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

Output parse_output(const std::string& name) {
    if(name == "s") return Output::s;
    if(name == "c") return Output::c;
    if(name == "F_T") return Output::F_T;
    if(name == "D_T") return Output::D_T;
    if(name == "Czz") return Output::Czz;
    throw ConfigError("unknown output '" + name + "' (expected s, c, F_T, D_T or Czz)");
}

std::string to_string(Output o) {
    switch(o) {
        case Output::s: return "s";
        case Output::c: return "c";
        case Output::F_T: return "F_T";
        case Output::D_T: return "D_T";
        case Output::Czz: return "Czz";
    }
    return "?";
}

models::ModelSpec RunConfig::model(std::size_t length, double parameter) const {
    models::ModelSpec spec;
    spec.length = length;
    if(family == models::Family::ising)
        spec.couplings = models::IsingCouplings{coupling_j, parameter};
    else
        spec.couplings = models::LmgCouplings{parameter};
    return spec;
}

thermal::TemperatureGrid RunConfig::grid() const {
    try {
        return thermal::TemperatureGrid::uniform(t_min, t_max, t_step, delta_t);
    } catch(const std::invalid_argument& e) {
        throw ConfigError(std::string("temperature: ") + e.what());
    }
}

lanczos::LanczosConfig RunConfig::lanczos() const {
    lanczos::LanczosConfig cfg;
    cfg.k_max = k_max;
    cfg.d_max = d_max;
    cfg.breakdown_tolerance = breakdown_tolerance;
    cfg.reorthogonalization = reorthogonalize ? lanczos::Reorthogonalization::full : lanczos::Reorthogonalization::off;
    if(stop_tolerance) cfg.stop_rules.push_back(lanczos::StopRule::partition_function(1.0 / t_min, *stop_tolerance));
    return cfg;
}

void RunConfig::validate() const {
    if(lengths.empty()) throw ConfigError("model: no chain length given");
    if(parameters.empty())
        throw ConfigError(family == models::Family::ising ? "model: no field g given" : "model: no field h given");
    for(auto l : lengths)
        if(l < 2) throw ConfigError(fmt::format("model: L={} is too small (need L >= 2)", l));
    for(double p : parameters)
        if(!std::isfinite(p)) throw ConfigError("model: field values must be finite");
    if(!std::isfinite(coupling_j)) throw ConfigError("model: J must be finite");
    (void)grid();
    if(outputs.empty()) throw ConfigError("outputs: at least one output must be requested");
    if(wants(Output::Czz) && pairs.empty()) throw ConfigError("outputs: Czz requested but correlators.pairs is empty");
    if(!wants(Output::Czz) && !pairs.empty()) throw ConfigError("correlators: pairs given but Czz is not in outputs");
    for(const auto& p : pairs) {
        if(p.i < 1 || p.i >= p.j) throw ConfigError(fmt::format("correlators: pair ({}, {}) needs 1 <= i < j", p.i, p.j));
        for(auto l : lengths)
            if(p.j > l) throw ConfigError(fmt::format("correlators: site {} outside a chain of length {}", p.j, l));
    }
    if(k_max < 1) throw ConfigError("lanczos: kmax must be >= 1");
    if(d_max < 1) throw ConfigError("lanczos: dmax must be >= 1");
    if(!(breakdown_tolerance > 0.0 && breakdown_tolerance < 1.0))
        throw ConfigError("lanczos: breakdown_tol must lie in (0, 1)");
    if(stop_tolerance && !(*stop_tolerance > 0.0)) throw ConfigError("lanczos: stop_tol must be > 0");
    if(workers < 1) throw ConfigError("workers must be >= 1");
}

void apply(RunConfig& cfg, const Overrides& o) {
    if(o.model) {
        const auto family = parse_family(*o.model);
        if(family != cfg.family) {
            // g and h are different fields; never carry one over as the other
            cfg.parameters.clear();
            cfg.coupling_j = 1.0;
        }
        cfg.family = family;
    }
    if(!o.lengths.empty()) cfg.lengths = o.lengths;
    if(cfg.family == models::Family::lmg) {
        if(!o.g.empty()) throw ConfigError("--g applies to the Ising model only");
        if(o.j) throw ConfigError("--J applies to the Ising model only");
        if(!o.h.empty()) cfg.parameters = o.h;
    } else {
        if(!o.h.empty()) throw ConfigError("--h applies to the LMG model only");
        if(!o.g.empty()) cfg.parameters = o.g;
        if(o.j) cfg.coupling_j = *o.j;
        if(cfg.parameters.empty()) cfg.parameters = {1.0};
    }
    if(o.t_min) cfg.t_min = *o.t_min;
    if(o.t_max) cfg.t_max = *o.t_max;
    if(o.t_step) cfg.t_step = *o.t_step;
    if(o.d_max) cfg.d_max = *o.d_max;
    if(o.k_max) cfg.k_max = *o.k_max;
    if(o.workers) cfg.workers = *o.workers;
    if(!o.outputs.empty()) {
        cfg.outputs.clear();
        for(const auto& name : o.outputs) cfg.outputs.insert(parse_output(name));
    }
    if(o.out) cfg.out = *o.out;
    if(o.cache_dir) cfg.cache_dir = *o.cache_dir;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch(const YAML::ParserException& e) {
        throw ConfigError(fmt::format("{}:{}:{}: {}", source, e.mark.line + 1, e.mark.column + 1, e.msg));
    }
    const Reader rd(source);
    if(!root.IsMap()) rd.fail(root, "top level must be a mapping");
    rd.only_keys(root, {"model", "temperature", "lanczos", "outputs", "correlators", "cache", "out", "workers"}, "config");

    RunConfig cfg;
    const auto model = root["model"];
    if(!model) throw ConfigError(source + ": missing required section 'model'");
    rd.only_keys(model, {"family", "L", "h", "J", "g"}, "model");
    if(!model["family"]) rd.fail(model, "model.family is required");
    try {
        cfg.family = parse_family(rd.scalar<std::string>(model["family"], "model.family"));
    } catch(const ConfigError& e) {
        rd.fail(model["family"], e.what());
    }
    if(model["L"]) cfg.lengths = rd.list<std::size_t>(model["L"], "model.L");
    if(cfg.family == models::Family::lmg) {
        if(model["g"] || model["J"]) rd.fail(model, "model: J and g apply to the Ising model only");
        if(model["h"]) cfg.parameters = rd.list<double>(model["h"], "model.h");
    } else {
        if(model["h"]) rd.fail(model["h"], "model.h applies to the LMG model only");
        if(model["J"]) cfg.coupling_j = rd.scalar<double>(model["J"], "model.J");
        cfg.parameters = model["g"] ? rd.list<double>(model["g"], "model.g") : std::vector<double>{1.0};
    }

    if(const auto t = root["temperature"]) {
        rd.only_keys(t, {"min", "max", "step", "delta"}, "temperature");
        if(t["min"]) cfg.t_min = rd.scalar<double>(t["min"], "temperature.min");
        if(t["max"]) cfg.t_max = rd.scalar<double>(t["max"], "temperature.max");
        if(t["step"]) cfg.t_step = rd.scalar<double>(t["step"], "temperature.step");
        if(t["delta"]) cfg.delta_t = rd.scalar<double>(t["delta"], "temperature.delta");
    }

    if(const auto l = root["lanczos"]) {
        rd.only_keys(l, {"kmax", "dmax", "breakdown_tol", "reorthogonalize", "stop_tol"}, "lanczos");
        if(l["kmax"]) cfg.k_max = rd.scalar<std::size_t>(l["kmax"], "lanczos.kmax");
        if(l["dmax"]) cfg.d_max = rd.scalar<std::size_t>(l["dmax"], "lanczos.dmax");
        if(l["breakdown_tol"]) cfg.breakdown_tolerance = rd.scalar<double>(l["breakdown_tol"], "lanczos.breakdown_tol");
        if(l["reorthogonalize"]) cfg.reorthogonalize = rd.scalar<bool>(l["reorthogonalize"], "lanczos.reorthogonalize");
        if(l["stop_tol"] && !l["stop_tol"].IsNull()) cfg.stop_tolerance = rd.scalar<double>(l["stop_tol"], "lanczos.stop_tol");
    }

    if(const auto outs = root["outputs"]) {
        if(!outs.IsSequence()) rd.fail(outs, "outputs must be a list");
        cfg.outputs.clear();
        for(const auto& item : outs) {
            try {
                cfg.outputs.insert(parse_output(rd.scalar<std::string>(item, "outputs")));
            } catch(const ConfigError& e) {
                rd.fail(item, e.what());
            }
        }
    }

    if(const auto corr = root["correlators"]) {
        rd.only_keys(corr, {"pairs", "symmetry"}, "correlators");
        if(const auto pairs = corr["pairs"]) {
            if(!pairs.IsSequence()) rd.fail(pairs, "correlators.pairs must be a list of [i, j]");
            for(const auto& p : pairs) {
                if(!p.IsSequence() || p.size() != 2) rd.fail(p, "each correlator pair must be [i, j]");
                cfg.pairs.push_back({rd.scalar<std::size_t>(p[0], "pair site"), rd.scalar<std::size_t>(p[1], "pair site")});
            }
        }
        if(corr["symmetry"]) {
            try {
                cfg.symmetry = parse_symmetry(rd.scalar<std::string>(corr["symmetry"], "correlators.symmetry"));
            } catch(const ConfigError& e) {
                rd.fail(corr["symmetry"], e.what());
            }
        }
    }

    if(root["cache"] && !root["cache"].IsNull()) cfg.cache_dir = rd.scalar<std::string>(root["cache"], "cache");
    if(root["out"]) cfg.out = rd.scalar<std::string>(root["out"], "out");
    if(root["workers"]) cfg.workers = rd.scalar<std::size_t>(root["workers"], "workers");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if(!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string run_key(const RunConfig& cfg, const models::ModelSpec& spec) {
    const auto desc = fmt::format("v1|{}|D={}|K={}|tol={:.17g}|reorth={}|stop={}", spec.label(), cfg.d_max, cfg.k_max,
                                  cfg.breakdown_tolerance, cfg.reorthogonalize,
                                  cfg.stop_tolerance ? fmt::format("{:.17g}@{:.17g}", *cfg.stop_tolerance, 1.0 / cfg.t_min)
                                                     : std::string("none"));
    return fmt::format("{}-{:016x}", spec.name(), fnv1a(desc));
}

} // namespace mpotrace::cli
