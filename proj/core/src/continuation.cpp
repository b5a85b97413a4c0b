#include "swing/continuation.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "swing/error.hpp"

namespace swing {

double ContinuationModel::value(int k, std::size_t level, double x) const {
    const auto kk = static_cast<std::size_t>(k);
    if (kk >= fitted.size() || level >= fitted[kk].size() || !fitted[kk][level]) {
        std::ostringstream msg;
        msg << "no continuation estimate for date " << k << ", level " << level;
        throw DomainError(msg.str());
    }
    if (kind == ContinuationKind::linear) {
        const auto& theta = coefficients[kk][level];
        double acc = 0.0;
        double features[64];
        if (basis.size <= 64) {
            eval_basis(basis, x, std::span<double>(features, basis.size));
            for (std::size_t i = 0; i < basis.size; ++i) acc += theta(static_cast<Eigen::Index>(i)) * features[i];
            return acc;
        }
        return theta.dot(eval_basis(basis, x));
    }
    return mlp_forward(network, networks[kk][level], std::span<const double>(&x, 1));
}

std::string contract_hash(const SwingContract& c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g", c.n_dates, c.strike, c.local_min,
                  c.local_max, c.global_min, c.global_max, c.discount);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001b3ULL;
    }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

using nlohmann::json;

void write_snapshot(std::ostream& out, const ContinuationModel& model) {
    json j;
    j["format"] = "swing-continuation";
    j["version"] = kSnapshotVersion;
    j["kind"] = model.kind == ContinuationKind::linear ? "linear" : "mlp";
    j["sample_count"] = model.sample_count;
    j["seed"] = model.seed;
    j["contract_hash"] = model.contract_hash;
    j["grid"] = {{"discrete", model.grid.discrete}, {"density", model.grid.density}, {"levels", model.grid.levels}};
    if (model.kind == ContinuationKind::linear) {
        j["basis"] = {{"kind", to_string(model.basis.kind)},
                      {"size", model.basis.size},
                      {"breakpoints", model.basis.breakpoints}};
    } else {
        j["network"] = {{"input_dim", model.network.input_dim},
                        {"depth", model.network.depth},
                        {"width", model.network.width},
                        {"activation", to_string(model.network.activation)},
                        {"param_bound", model.network.bound()}};
    }
    json dates = json::array();
    for (std::size_t k = 0; k < model.fitted.size(); ++k) {
        json levels = json::array();
        for (std::size_t l = 0; l < model.fitted[k].size(); ++l) {
            if (!model.fitted[k][l]) {
                levels.push_back(nullptr);
            } else if (model.kind == ContinuationKind::linear) {
                const auto& t = model.coefficients[k][l];
                levels.push_back(std::vector<double>(t.data(), t.data() + t.size()));
            } else {
                levels.push_back(model.networks[k][l].theta);
            }
        }
        dates.push_back(std::move(levels));
    }
    j["estimators"] = std::move(dates);
    out << j.dump(1) << '\n';
}

ContinuationModel read_snapshot(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("snapshot parse error: ") + e.what());
    }
    try {
        if (j.at("format") != "swing-continuation") throw ConfigError("not a continuation snapshot");
        if (j.at("version").get<int>() != kSnapshotVersion) throw ConfigError("unsupported snapshot version");
        ContinuationModel m;
        m.kind = j.at("kind") == "linear" ? ContinuationKind::linear : ContinuationKind::mlp;
        m.sample_count = j.at("sample_count").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.contract_hash = j.at("contract_hash").get<std::string>();
        m.grid.discrete = j.at("grid").at("discrete").get<bool>();
        m.grid.density = j.at("grid").at("density").get<int>();
        m.grid.levels = j.at("grid").at("levels").get<std::vector<std::vector<double>>>();
        if (m.kind == ContinuationKind::linear) {
            const auto& b = j.at("basis");
            m.basis.kind = basis_kind_from_string(b.at("kind").get<std::string>());
            m.basis.size = b.at("size").get<std::size_t>();
            m.basis.breakpoints = b.at("breakpoints").get<std::vector<double>>();
        } else {
            const auto& n = j.at("network");
            m.network.input_dim = n.at("input_dim").get<std::size_t>();
            m.network.depth = n.at("depth").get<std::size_t>();
            m.network.width = n.at("width").get<std::size_t>();
            m.network.activation = activation_from_string(n.at("activation").get<std::string>());
            m.network.param_bound = n.at("param_bound").get<double>();
        }
        const auto& dates = j.at("estimators");
        m.fitted.resize(dates.size());
        m.coefficients.resize(dates.size());
        m.networks.resize(dates.size());
        for (std::size_t k = 0; k < dates.size(); ++k) {
            const auto& levels = dates[k];
            m.fitted[k].assign(levels.size(), false);
            m.coefficients[k].resize(levels.size());
            m.networks[k].resize(levels.size());
            for (std::size_t l = 0; l < levels.size(); ++l) {
                if (levels[l].is_null()) continue;
                auto values = levels[l].get<std::vector<double>>();
                m.fitted[k][l] = true;
                if (m.kind == ContinuationKind::linear) {
                    m.coefficients[k][l] = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
                } else {
                    m.networks[k][l].theta = std::move(values);
                }
            }
        }
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed snapshot: ") + e.what());
    }
}

}  // namespace swing
