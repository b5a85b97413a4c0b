#include "swing/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "swing/error.hpp"
#include "swing/rng.hpp"

namespace swing {

std::string to_string(EngineMode mode) {
    switch (mode) {
        case EngineMode::lsmc: return "lsmc";
        case EngineMode::nn: return "nn";
        case EngineMode::oracle: return "oracle";
    }
    return "unknown";
}

EngineMode engine_mode_from_string(const std::string& name) {
    if (name == "lsmc") return EngineMode::lsmc;
    if (name == "nn") return EngineMode::nn;
    if (name == "oracle") return EngineMode::oracle;
    throw ConfigError("unknown engine '" + name + "' (expected lsmc, nn or oracle)");
}

FiniteStateModel ModelSpec::finite_model() const {
    if (kind != Kind::finite) throw ConfigError("model: a finite-state model is required here");
    FiniteStateModel m;
    m.states = states;
    m.initial = initial;
    m.spot_values = spot;
    const auto j = static_cast<Eigen::Index>(transition.size());
    Eigen::MatrixXd p(j, j);
    for (Eigen::Index r = 0; r < j; ++r) {
        const auto& row = transition[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != j) {
            throw ConfigError("model.transition: row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                              " entries, expected " + std::to_string(j));
        }
        for (Eigen::Index c = 0; c < j; ++c) p(r, c) = row[static_cast<std::size_t>(c)];
    }
    m.transitions.push_back(std::move(p));
    return m;
}

MarketModel ModelSpec::build() const {
    if (kind == Kind::finite) return finite_model();
    GaussianOneFactorModel g;
    g.mean_reversion = mean_reversion;
    g.vol = vol;
    g.x0 = x0;
    g.forward_curve = forward_curve;
    g.state_bound = state_bound;
    return g;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) throw ConfigError("expected a number, got '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError("expected a non-negative integer, got '" + s + "'");
    }
    return v;
}

long long parse_int(const std::string& s) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("expected true or false, got '" + s + "'");
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F f, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += f(xs[i]);
    }
    return out;
}

std::vector<double> doubles(const std::string& s) {
    std::vector<double> out;
    if (s.empty()) return out;
    for (const auto& item : split(s, ',')) out.push_back(parse_double(item));
    return out;
}

std::vector<std::size_t> counts(const std::string& s) {
    std::vector<std::size_t> out;
    if (s.empty()) return out;
    for (const auto& item : split(s, ',')) out.push_back(static_cast<std::size_t>(parse_u64(item)));
    return out;
}

std::vector<std::vector<double>> matrix(const std::string& s) {
    std::vector<std::vector<double>> out;
    if (s.empty()) return out;
    for (const auto& row : split(s, ';')) out.push_back(doubles(row));
    return out;
}

std::string matrix_text(const std::vector<std::vector<double>>& m) {
    return join(m, [](const std::vector<double>& row) { return join(row, num); }, "; ");
}

struct Field {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
    bool echo = true;  ///< part of the computation identity
};

const std::vector<Field>& fields() {
    using C = RunConfig;
    using S = std::string;
    auto sz = [](std::size_t v) { return std::to_string(v); };
    static const std::vector<Field> table = {
        {"n_dates", [](const C& c) { return std::to_string(c.contract.n_dates); },
         [](C& c, const S& v) { c.contract.n_dates = static_cast<int>(parse_int(v)); }},
        {"strike", [](const C& c) { return num(c.contract.strike); },
         [](C& c, const S& v) { c.contract.strike = parse_double(v); }},
        {"q_min", [](const C& c) { return num(c.contract.local_min); },
         [](C& c, const S& v) { c.contract.local_min = parse_double(v); }},
        {"q_max", [](const C& c) { return num(c.contract.local_max); },
         [](C& c, const S& v) { c.contract.local_max = parse_double(v); }},
        {"Q_min", [](const C& c) { return num(c.contract.global_min); },
         [](C& c, const S& v) { c.contract.global_min = parse_double(v); }},
        {"Q_max", [](const C& c) { return num(c.contract.global_max); },
         [](C& c, const S& v) { c.contract.global_max = parse_double(v); }},
        {"discount", [](const C& c) { return num(c.contract.discount); },
         [](C& c, const S& v) { c.contract.discount = parse_double(v); }},
        {"discrete", [](const C& c) { return S(c.discrete ? "true" : "false"); },
         [](C& c, const S& v) { c.discrete = parse_bool(v); }},

        {"model", [](const C& c) { return S(c.model.kind == ModelSpec::Kind::finite ? "finite" : "gaussian"); },
         [](C& c, const S& v) {
             if (v == "finite") c.model.kind = ModelSpec::Kind::finite;
             else if (v == "gaussian") c.model.kind = ModelSpec::Kind::gaussian;
             else throw ConfigError("expected finite or gaussian, got '" + v + "'");
         }},
        {"model.mean_reversion", [](const C& c) { return num(c.model.mean_reversion); },
         [](C& c, const S& v) { c.model.mean_reversion = parse_double(v); }},
        {"model.vol", [](const C& c) { return num(c.model.vol); },
         [](C& c, const S& v) { c.model.vol = parse_double(v); }},
        {"model.x0", [](const C& c) { return num(c.model.x0); }, [](C& c, const S& v) { c.model.x0 = parse_double(v); }},
        {"model.forward_curve", [](const C& c) { return join(c.model.forward_curve, num); },
         [](C& c, const S& v) { c.model.forward_curve = doubles(v); }},
        {"model.state_bound", [](const C& c) { return num(c.model.state_bound); },
         [](C& c, const S& v) { c.model.state_bound = parse_double(v); }},
        {"model.states", [](const C& c) { return join(c.model.states, num); },
         [](C& c, const S& v) { c.model.states = doubles(v); }},
        {"model.transition", [](const C& c) { return matrix_text(c.model.transition); },
         [](C& c, const S& v) { c.model.transition = matrix(v); }},
        {"model.initial", [](const C& c) { return join(c.model.initial, num); },
         [](C& c, const S& v) { c.model.initial = doubles(v); }},
        {"model.spot", [](const C& c) { return matrix_text(c.model.spot); },
         [](C& c, const S& v) { c.model.spot = matrix(v); }},

        {"engine", [](const C& c) { return to_string(c.engine); },
         [](C& c, const S& v) { c.engine = engine_mode_from_string(v); }},
        {"basis", [](const C& c) { return to_string(c.basis.kind); },
         [](C& c, const S& v) { c.basis.kind = basis_kind_from_string(v); }},
        {"basis.size", [sz](const C& c) { return sz(c.basis.size); },
         [](C& c, const S& v) { c.basis.size = static_cast<std::size_t>(parse_u64(v)); }},
        {"basis.breakpoints", [](const C& c) { return join(c.basis.breakpoints, num); },
         [](C& c, const S& v) { c.basis.breakpoints = doubles(v); }},
        {"mlp.depth", [sz](const C& c) { return sz(c.network.depth); },
         [](C& c, const S& v) { c.network.depth = static_cast<std::size_t>(parse_u64(v)); }},
        {"mlp.width", [sz](const C& c) { return sz(c.network.width); },
         [](C& c, const S& v) { c.network.width = static_cast<std::size_t>(parse_u64(v)); }},
        {"mlp.activation", [](const C& c) { return to_string(c.network.activation); },
         [](C& c, const S& v) { c.network.activation = activation_from_string(v); }},
        {"mlp.param_bound", [](const C& c) { return num(c.network.param_bound); },
         [](C& c, const S& v) { c.network.param_bound = parse_double(v); }},
        {"train.epochs", [sz](const C& c) { return sz(c.training.epochs); },
         [](C& c, const S& v) { c.training.epochs = static_cast<std::size_t>(parse_u64(v)); }},
        {"train.batch_size", [sz](const C& c) { return sz(c.training.batch_size); },
         [](C& c, const S& v) { c.training.batch_size = static_cast<std::size_t>(parse_u64(v)); }},
        {"train.step_size", [](const C& c) { return num(c.training.step_size); },
         [](C& c, const S& v) { c.training.step_size = parse_double(v); }},
        {"train.step_decay", [](const C& c) { return num(c.training.step_decay); },
         [](C& c, const S& v) { c.training.step_decay = parse_double(v); }},
        {"train.init_scale", [](const C& c) { return num(c.training.init_scale); },
         [](C& c, const S& v) { c.training.init_scale = parse_double(v); }},
        {"train.restarts", [sz](const C& c) { return sz(c.training.restarts); },
         [](C& c, const S& v) { c.training.restarts = static_cast<std::size_t>(parse_u64(v)); }},
        {"train.tolerance", [](const C& c) { return num(c.training.tolerance); },
         [](C& c, const S& v) { c.training.tolerance = parse_double(v); }},

        {"n_paths", [sz](const C& c) { return sz(c.n_paths); },
         [](C& c, const S& v) { c.n_paths = static_cast<std::size_t>(parse_u64(v)); }},
        {"forward_paths", [sz](const C& c) { return sz(c.forward_paths); },
         [](C& c, const S& v) { c.forward_paths = static_cast<std::size_t>(parse_u64(v)); }},
        {"grid_density", [](const C& c) { return std::to_string(c.grid_density); },
         [](C& c, const S& v) { c.grid_density = static_cast<int>(parse_int(v)); }},
        {"seed", [](const C& c) { return std::to_string(c.seed); }, [](C& c, const S& v) { c.seed = parse_u64(v); }},
        {"training_seed", [](const C& c) { return std::to_string(c.training_seed); },
         [](C& c, const S& v) { c.training_seed = parse_u64(v); }},
        {"forward_seed", [](const C& c) { return std::to_string(c.forward_seed); },
         [](C& c, const S& v) { c.forward_seed = parse_u64(v); }},

        {"sweep_m.basis", [](const C& c) { return c.experiment.sweep_basis; },
         [](C& c, const S& v) { c.experiment.sweep_basis = to_string(basis_kind_from_string(v)); }},
        {"sweep_m.sizes", [sz](const C& c) { return join(c.experiment.basis_sizes, sz); },
         [](C& c, const S& v) { c.experiment.basis_sizes = counts(v); }},
        {"sweep_n.sizes", [sz](const C& c) { return join(c.experiment.mc_sizes, sz); },
         [](C& c, const S& v) { c.experiment.mc_sizes = counts(v); }},
        {"sweep_n.replications", [sz](const C& c) { return sz(c.experiment.mc_replications); },
         [](C& c, const S& v) { c.experiment.mc_replications = static_cast<std::size_t>(parse_u64(v)); }},
        {"sweep_n.norm_order", [](const C& c) { return num(c.experiment.norm_order); },
         [](C& c, const S& v) { c.experiment.norm_order = parse_double(v); }},
        {"sweep_n.slope_lo", [](const C& c) { return num(c.experiment.slope_lo); },
         [](C& c, const S& v) { c.experiment.slope_lo = parse_double(v); }},
        {"sweep_n.slope_hi", [](const C& c) { return num(c.experiment.slope_hi); },
         [](C& c, const S& v) { c.experiment.slope_hi = parse_double(v); }},
        {"mz.law", [](const C& c) { return c.experiment.mz_law; },
         [](C& c, const S& v) { c.experiment.mz_law = to_string(sample_law_from_string(v)); }},
        {"mz.parameter", [](const C& c) { return num(c.experiment.mz_parameter); },
         [](C& c, const S& v) { c.experiment.mz_parameter = parse_double(v); }},
        {"mz.order", [](const C& c) { return num(c.experiment.mz_order); },
         [](C& c, const S& v) { c.experiment.mz_order = parse_double(v); }},
        {"mz.sizes", [sz](const C& c) { return join(c.experiment.mz_sizes, sz); },
         [](C& c, const S& v) { c.experiment.mz_sizes = counts(v); }},
        {"mz.replications", [sz](const C& c) { return sz(c.experiment.mz_replications); },
         [](C& c, const S& v) { c.experiment.mz_replications = static_cast<std::size_t>(parse_u64(v)); }},
        {"mz.expected_slope", [](const C& c) { return num(c.experiment.mz_expected_slope); },
         [](C& c, const S& v) { c.experiment.mz_expected_slope = parse_double(v); }},
        {"mz.slope_tolerance", [](const C& c) { return num(c.experiment.mz_slope_tolerance); },
         [](C& c, const S& v) { c.experiment.mz_slope_tolerance = parse_double(v); }},
        {"tails.sizes", [sz](const C& c) { return join(c.experiment.tail_sizes, sz); },
         [](C& c, const S& v) { c.experiment.tail_sizes = counts(v); }},
        {"tails.replications", [sz](const C& c) { return sz(c.experiment.tail_replications); },
         [](C& c, const S& v) { c.experiment.tail_replications = static_cast<std::size_t>(parse_u64(v)); }},
        {"tails.delta", [](const C& c) { return num(c.experiment.tail_delta); },
         [](C& c, const S& v) { c.experiment.tail_delta = parse_double(v); }},
        {"tails.target_frequency", [](const C& c) { return num(c.experiment.tail_target_frequency); },
         [](C& c, const S& v) { c.experiment.tail_target_frequency = parse_double(v); }},
        {"tails.slope_slack", [](const C& c) { return num(c.experiment.tail_slope_slack); },
         [](C& c, const S& v) { c.experiment.tail_slope_slack = parse_double(v); }},
        {"continuity.densities",
         [](const C& c) { return join(c.experiment.densities, [](int d) { return std::to_string(d); }); },
         [](C& c, const S& v) {
             c.experiment.densities.clear();
             for (std::size_t d : counts(v)) c.experiment.densities.push_back(static_cast<int>(d));
         }},
        {"nn_sweep.widths", [sz](const C& c) { return join(c.experiment.nn_widths, sz); },
         [](C& c, const S& v) { c.experiment.nn_widths = counts(v); }},
        {"nn_sweep.loss_tolerance", [](const C& c) { return num(c.experiment.nn_loss_tolerance); },
         [](C& c, const S& v) { c.experiment.nn_loss_tolerance = parse_double(v); }},

        {"out_dir", [](const C& c) { return c.out_dir; }, [](C& c, const S& v) { c.out_dir = v; }, false},
        {"threads", [](const C& c) { return std::to_string(c.threads); },
         [](C& c, const S& v) { c.threads = static_cast<unsigned>(parse_u64(v)); }, false},
    };
    return table;
}

std::uint64_t training_seed_for(std::uint64_t seed) { return derive_seed(seed, 0x747261696eULL); }
std::uint64_t forward_seed_for(std::uint64_t seed) { return derive_seed(seed, 0x666f7277617264ULL); }

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

void RunConfig::reseed(std::uint64_t simulation_seed) {
    seed = simulation_seed;
    training_seed = training_seed_for(seed);
    forward_seed = forward_seed_for(seed);
    training.seed = training_seed;
}

void RunConfig::validate() const {
    contract.validate();
    if (discrete && !contract.bang_bang_setting()) {
        // Discrete mode needs whole-number bounds; build_ladder names them.
        (void)build_ladder(contract, true);
    }
    if (model.kind == ModelSpec::Kind::finite) {
        require(!model.states.empty(), "model.states", "at least one state is required");
        require(model.transition.size() == model.states.size(), "model.transition",
                "needs one row per state (" + std::to_string(model.states.size()) + ")");
        require(model.initial.size() == model.states.size(), "model.initial",
                "needs one probability per state (" + std::to_string(model.states.size()) + ")");
        require(model.spot.size() == 1 || model.spot.size() == static_cast<std::size_t>(contract.n_dates),
                "model.spot", "needs one row, or one row per date");
        for (const auto& row : model.spot) {
            require(row.size() == model.states.size(), "model.spot", "every row needs one level per state");
        }
        try {
            model.finite_model().validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
    } else {
        try {
            std::get<GaussianOneFactorModel>(model.build()).validate(contract.n_dates);
        } catch (const Error& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
    }
    try {
        basis.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("basis: ") + e.what());
    }
    try {
        network.validate();
        training.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("mlp/train: ") + e.what());
    }
    require(engine != EngineMode::nn || discrete, "engine",
            "nn requires discrete = true (integer volumes, bang-bang controls)");
    require(engine != EngineMode::oracle || model.kind == ModelSpec::Kind::finite, "engine",
            "oracle requires model = finite");
    require(n_paths >= 1, "n_paths", "must be positive");
    require(forward_paths >= 1, "forward_paths", "must be positive");
    require(grid_density >= 2, "grid_density", "must be at least 2");
    require(forward_seed != seed, "forward_seed", "must differ from seed (fresh out-of-sample paths)");
    require(threads >= 1, "threads", "must be positive");
    require(!out_dir.empty(), "out_dir", "must not be empty");
    require(experiment.mc_replications >= 1, "sweep_n.replications", "must be positive");
    require(experiment.mz_replications >= 1, "mz.replications", "must be positive");
    require(experiment.tail_replications >= 1, "tails.replications", "must be positive");
    for (std::size_t v : experiment.mc_sizes) require(v >= 1, "sweep_n.sizes", "entries must be positive");
    for (std::size_t v : experiment.mz_sizes) require(v >= 1, "mz.sizes", "entries must be positive");
    for (std::size_t v : experiment.tail_sizes) require(v >= 1, "tails.sizes", "entries must be positive");
    for (std::size_t v : experiment.basis_sizes) require(v >= 1, "sweep_m.sizes", "entries must be positive");
    for (std::size_t v : experiment.nn_widths) require(v >= 1, "nn_sweep.widths", "entries must be positive");
    for (int v : experiment.densities) require(v >= 2, "continuity.densities", "entries must be at least 2");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    std::map<std::string, const Field*> by_key;
    for (const Field& f : fields()) by_key.emplace(f.key, &f);

    RunConfig config;
    std::set<std::string> seen;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(number) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = by_key.find(key);
        if (it == by_key.end()) throw ConfigError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            it->second->set(config, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + key + ": " + e.what());
        }
    }
    if (!seen.count("training_seed")) config.training_seed = training_seed_for(config.seed);
    if (!seen.count("forward_seed")) config.forward_seed = forward_seed_for(config.seed);
    config.training.seed = config.training_seed;
    try {
        config.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    for (const Field& f : fields()) out += f.key + " = " + f.get(config) + "\n";
    return out;
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const Field& f : fields()) {
        if (!f.echo) continue;
        for (char ch : f.key + "=" + f.get(config) + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FiniteSetup finite_setup(const RunConfig& config) {
    return FiniteSetup{config.contract, config.model.finite_model(), config.discrete, config.grid_density};
}

}  // namespace swing
