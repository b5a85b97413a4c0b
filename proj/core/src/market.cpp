#include "swing/market.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "swing/error.hpp"
#include "swing/parallel.hpp"
#include "swing/rng.hpp"

namespace swing {

void GaussianOneFactorModel::validate(int n_dates) const {
    if (!(mean_reversion >= 0.0) || !std::isfinite(mean_reversion)) {
        throw ConfigError("mean_reversion must be finite and >= 0");
    }
    if (!(vol >= 0.0) || !std::isfinite(vol)) throw ConfigError("vol must be finite and >= 0");
    if (!std::isfinite(x0)) throw ConfigError("x0 must be finite");
    if (!(state_bound > 0.0)) throw ConfigError("state_bound must be > 0");
    if (forward_curve.size() != 1 && static_cast<int>(forward_curve.size()) < n_dates) {
        std::ostringstream msg;
        msg << "forward_curve needs 1 or >= " << n_dates << " levels (got " << forward_curve.size() << ")";
        throw ConfigError(msg.str());
    }
    for (double f : forward_curve) {
        if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("forward_curve levels must be positive");
    }
}

double GaussianOneFactorModel::latent_mean(int k) const {
    return std::exp(-mean_reversion * (k + 1)) * x0;
}

double GaussianOneFactorModel::latent_sd(int k) const {
    const double a2 = std::exp(-2.0 * mean_reversion);
    double var = 0.0;
    double term = 1.0;
    for (int i = 0; i <= k; ++i) {
        var += term;
        term *= a2;
    }
    return vol * std::sqrt(var);
}

double GaussianOneFactorModel::spot(int k, double x) const {
    const double level = forward_curve.size() == 1 ? forward_curve.front()
                                                   : forward_curve[static_cast<std::size_t>(k)];
    const double sd = latent_sd(k);
    const double clamped = std::clamp(x, -state_bound, state_bound);
    return level * std::exp(sd * clamped - 0.5 * sd * sd);
}

void FiniteStateModel::validate() const {
    const std::size_t j = states.size();
    if (j == 0) throw ConfigError("finite-state model needs at least one state");
    if (initial.size() != j) throw ConfigError("initial distribution length must equal the state count");
    if (transitions.empty()) throw ConfigError("finite-state model needs a transition matrix");
    if (spot_values.empty()) throw ConfigError("finite-state model needs spot_values");
    double mass = 0.0;
    for (double p : initial) {
        if (!(p >= 0.0)) throw ConfigError("initial probabilities must be >= 0");
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-12) throw ConfigError("initial distribution must sum to 1");
    for (std::size_t t = 0; t < transitions.size(); ++t) {
        const auto& m = transitions[t];
        if (static_cast<std::size_t>(m.rows()) != j || static_cast<std::size_t>(m.cols()) != j) {
            throw ConfigError("transition matrices must be J x J");
        }
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if ((m.row(r).array() < 0.0).any()) throw ConfigError("transition probabilities must be >= 0");
            if (std::abs(m.row(r).sum() - 1.0) > 1e-12) {
                std::ostringstream msg;
                msg << "transition " << t << " row " << r << " does not sum to 1";
                throw ConfigError(msg.str());
            }
        }
    }
    for (const auto& row : spot_values) {
        if (row.size() != j) throw ConfigError("spot_values rows must have one entry per state");
    }
}

const Eigen::MatrixXd& FiniteStateModel::transition(int k) const {
    return transitions.size() == 1 ? transitions.front() : transitions.at(static_cast<std::size_t>(k));
}

double FiniteStateModel::spot(int k, std::size_t j) const {
    const auto& row = spot_values.size() == 1 ? spot_values.front()
                                              : spot_values.at(static_cast<std::size_t>(k));
    return row[j];
}

std::vector<double> FiniteStateModel::marginal(int k) const {
    Eigen::RowVectorXd p = Eigen::Map<const Eigen::RowVectorXd>(initial.data(),
                                                                static_cast<Eigen::Index>(initial.size()));
    for (int step = 0; step < k; ++step) p = p * transition(step);
    return {p.data(), p.data() + p.size()};
}

PathSet simulate_paths(const GaussianOneFactorModel& model, int n_dates, std::size_t n_paths,
                       std::uint64_t seed, unsigned threads) {
    if (n_dates < 1 || n_paths < 1) throw ConfigError("simulate_paths needs n_dates >= 1 and n_paths >= 1");
    model.validate(n_dates);
    PathSet out;
    out.n_paths = n_paths;
    out.n_dates = n_dates;
    out.seed = seed;
    out.state.assign(n_paths * static_cast<std::size_t>(n_dates), 0.0);
    out.spot.assign(out.state.size(), 0.0);

    const double a = std::exp(-model.mean_reversion);
    std::vector<double> sd(static_cast<std::size_t>(n_dates));
    std::vector<double> mean(sd.size());
    for (int k = 0; k < n_dates; ++k) {
        sd[static_cast<std::size_t>(k)] = model.latent_sd(k);
        mean[static_cast<std::size_t>(k)] = model.latent_mean(k);
    }

    parallel_for(n_paths, threads, [&](std::size_t p) {
        double latent = model.x0;
        for (int k = 0; k < n_dates; ++k) {
            CounterRng rng(seed, p, static_cast<std::uint64_t>(k));
            latent = a * latent + model.vol * rng.normal();
            const auto kk = static_cast<std::size_t>(k);
            const double x = sd[kk] > 0.0 ? (latent - mean[kk]) / sd[kk] : 0.0;
            out.state[out.at(p, k)] = x;
            out.spot[out.at(p, k)] = model.spot(k, x);
        }
    });
    return out;
}

namespace {

std::size_t sample_index(std::span<const double> probabilities, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        if (u < acc) return i;
    }
    // u beyond the accumulated mass through rounding: last state with mass.
    for (std::size_t i = probabilities.size(); i-- > 0;) {
        if (probabilities[i] > 0.0) return i;
    }
    return probabilities.size() - 1;
}

}  // namespace

PathSet simulate_paths(const FiniteStateModel& model, int n_dates, std::size_t n_paths,
                       std::uint64_t seed, unsigned threads) {
    if (n_dates < 1 || n_paths < 1) throw ConfigError("simulate_paths needs n_dates >= 1 and n_paths >= 1");
    model.validate();
    PathSet out;
    out.n_paths = n_paths;
    out.n_dates = n_dates;
    out.seed = seed;
    out.state.assign(n_paths * static_cast<std::size_t>(n_dates), 0.0);
    out.spot.assign(out.state.size(), 0.0);
    out.state_index.assign(out.state.size(), 0);

    const std::size_t j_count = model.size();
    // Row-major copies of the transition rows for sampling.
    std::vector<std::vector<double>> rows;
    const std::size_t n_mats = model.transitions.size();
    rows.reserve(n_mats * j_count);
    for (const auto& m : model.transitions) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            std::vector<double> row(j_count);
            for (std::size_t c = 0; c < j_count; ++c) row[c] = m(r, static_cast<Eigen::Index>(c));
            rows.push_back(std::move(row));
        }
    }

    parallel_for(n_paths, threads, [&](std::size_t p) {
        std::size_t current = 0;
        for (int k = 0; k < n_dates; ++k) {
            CounterRng rng(seed, p, static_cast<std::uint64_t>(k));
            if (k == 0) {
                current = sample_index(model.initial, rng.uniform());
            } else {
                const std::size_t mat = n_mats == 1 ? 0 : static_cast<std::size_t>(k - 1);
                current = sample_index(rows[mat * j_count + current], rng.uniform());
            }
            const std::size_t at = out.at(p, k);
            out.state_index[at] = static_cast<int>(current);
            out.state[at] = model.states[current];
            out.spot[at] = model.spot(k, current);
        }
    });
    return out;
}

PathSet simulate_paths(const MarketModel& model, int n_dates, std::size_t n_paths, std::uint64_t seed,
                       unsigned threads) {
    return std::visit([&](const auto& m) { return simulate_paths(m, n_dates, n_paths, seed, threads); }, model);
}

std::vector<double> exact_conditional_expectation(const FiniteStateModel& model, int k,
                                                  std::span<const double> values_next) {
    if (values_next.size() != model.size()) {
        std::ostringstream msg;
        msg << "values_next has length " << values_next.size() << ", expected " << model.size();
        throw DomainError(msg.str());
    }
    const auto& m = model.transition(k);
    std::vector<double> out(model.size(), 0.0);
    for (std::size_t r = 0; r < model.size(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < model.size(); ++c) {
            acc += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * values_next[c];
        }
        out[r] = acc;
    }
    return out;
}

void write_paths_csv(std::ostream& out, const PathSet& paths) {
    out << "path,date,state,spot\n";
    char buf[96];
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
        for (int k = 0; k < paths.n_dates; ++k) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g\n", p, k, paths.x(p, k), paths.s(p, k));
            out << buf;
        }
    }
}

}  // namespace swing
