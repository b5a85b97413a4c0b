#include "swing/lsmc.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "swing/error.hpp"
#include "swing/parallel.hpp"

namespace swing {

double ValueSurface::mean(std::size_t level) const {
    double acc = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) acc += at(p, level);
    return acc / static_cast<double>(n_paths);
}

double ValueSurface::std_dev(std::size_t level) const {
    const double mu = mean(level);
    double acc = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        const double d = at(p, level) - mu;
        acc += d * d;
    }
    return n_paths > 1 ? std::sqrt(acc / static_cast<double>(n_paths - 1)) : 0.0;
}

std::string to_string(PricePhase phase) {
    return phase == PricePhase::in_sample_backward ? "in_sample_backward" : "out_of_sample_forward";
}

namespace {

void check_grid(const SwingContract& contract, const QGrid& grid) {
    if (grid.n_dates() != contract.n_dates) throw DomainError("grid does not match the contract's date count");
}

struct MeanAndError {
    double mean = 0.0;
    double std_error = 0.0;
};

MeanAndError summarize(const std::vector<double>& xs) {
    MeanAndError out;
    if (xs.empty()) return out;
    double acc = 0.0;
    for (double v : xs) acc += v;
    out.mean = acc / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double v : xs) sq += (v - out.mean) * (v - out.mean);
        out.std_error = std::sqrt(sq / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return out;
}

}  // namespace

ValueSurface terminal_values(const SwingContract& contract, const VolumeLadder& ladder, const PathSet& paths,
                             const QGrid& grid) {
    check_grid(contract, grid);
    const int last = contract.n_dates - 1;
    const auto& levels = grid.at(last);
    ValueSurface surface;
    surface.date = last;
    surface.levels = levels;
    surface.n_paths = paths.n_paths;
    surface.values.resize(paths.n_paths * levels.size());
    std::vector<std::vector<Candidate>> options;
    for (double q : levels) options.push_back(candidates(contract, ladder, grid, ControlSearch{}, last, q));
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
        const double spot = paths.s(p, last);
        for (std::size_t l = 0; l < levels.size(); ++l) {
            surface.values[p * levels.size() + l] =
                best_candidate(options[l], spot, contract.strike, contract.discount, true, [](std::size_t) { return 0.0; })
                    .value;
        }
    }
    return surface;
}

BackwardResult backward_sweep(const SwingContract& contract, const VolumeLadder& ladder, const PathSet& paths,
                              const BasisSpec& basis, const QGrid& grid, const BackwardOptions& options) {
    basis.validate();
    check_grid(contract, grid);
    if (paths.n_dates < contract.n_dates) throw DomainError("path set covers fewer dates than the contract");
    const std::size_t n_paths = paths.n_paths;
    const std::size_t m = basis.size;
    if (contract.n_dates > 1 && n_paths < m) {
        std::ostringstream msg;
        msg << "underdetermined regression: N = " << n_paths << " paths for m = " << m << " basis functions";
        throw DomainError(msg.str());
    }
    const int n = contract.n_dates;
    const ControlSearch search = options.use_default_search ? default_search(grid) : options.search;
    const CandidatePlan plan = plan_candidates(contract, ladder, grid, search);

    BackwardResult result;
    ContinuationModel& model = result.model;
    model.kind = ContinuationKind::linear;
    model.basis = basis;
    model.grid = grid;
    model.sample_count = n_paths;
    model.seed = paths.seed;
    model.contract_hash = contract_hash(contract);
    model.coefficients.resize(static_cast<std::size_t>(std::max(0, n - 1)));
    model.fitted.resize(model.coefficients.size());

    ValueSurface next = terminal_values(contract, ladder, paths, grid);
    std::vector<double> features(n_paths * m);
    std::vector<double> continuation;

    for (int k = n - 2; k >= 0; --k) {
        const auto kk = static_cast<std::size_t>(k);
        const std::size_t next_levels = grid.at(k + 1).size();
        const std::size_t cur_levels = grid.at(k).size();
        const std::vector<bool> reached =
            grid.discrete ? reached_levels(plan, grid, k) : std::vector<bool>(next_levels, true);

        parallel_for(n_paths, options.threads, [&](std::size_t p) {
            eval_basis(basis, paths.x(p, k), std::span<double>(features.data() + p * m, m));
        });
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> design(
            features.data(), static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(m));

        std::optional<GramSolver> solver;
        if (!options.identity_gram) {
            solver.emplace(empirical_gram(design));
            if (solver->uses_pseudo_inverse()) ++result.pseudo_inverse_fits;
        }

        auto& thetas = model.coefficients[kk];
        thetas.assign(next_levels, Eigen::VectorXd());
        model.fitted[kk] = reached;
        parallel_for(next_levels, options.threads, [&](std::size_t l) {
            if (!reached[l]) return;
            Eigen::VectorXd moment = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
            for (std::size_t p = 0; p < n_paths; ++p) {
                const double y = next.at(p, l);
                if (!std::isfinite(y)) {
                    std::ostringstream msg;
                    msg << "non-finite regression target at date " << k + 1 << ", Q = " << grid.at(k + 1)[l];
                    throw NumericalError(msg.str());
                }
                for (std::size_t i = 0; i < m; ++i) moment(static_cast<Eigen::Index>(i)) += y * features[p * m + i];
            }
            moment /= static_cast<double>(n_paths);
            thetas[l] = options.identity_gram ? moment : solver->solve(moment).theta;
        });

        continuation.assign(n_paths * next_levels, 0.0);
        ValueSurface current;
        current.date = k;
        current.levels = grid.at(k);
        current.n_paths = n_paths;
        current.values.resize(n_paths * cur_levels);
        parallel_for(n_paths, options.threads, [&](std::size_t p) {
            double* row = continuation.data() + p * next_levels;
            const double* f = features.data() + p * m;
            for (std::size_t l = 0; l < next_levels; ++l) {
                if (!reached[l]) continue;
                const auto& theta = thetas[l];
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += theta(static_cast<Eigen::Index>(i)) * f[i];
                row[l] = acc;
            }
            const double spot = paths.s(p, k);
            for (std::size_t i = 0; i < cur_levels; ++i) {
                current.values[p * cur_levels + i] =
                    best_candidate(plan.at(k, i), spot, contract.strike, contract.discount, false,
                                   [row](std::size_t l) { return row[l]; })
                        .value;
            }
        });
        next = std::move(current);
    }

    result.date0 = std::move(next);
    // T_0 = {0}: level 0 at date 0.
    result.in_sample.value = result.date0.mean(0);
    result.in_sample.n_paths = n_paths;
    result.in_sample.phase = PricePhase::in_sample_backward;
    if (options.realized_std_error) {
        result.in_sample.std_error = evaluate_policy(contract, ladder, model, paths, options.threads).estimate.std_error;
    }
    return result;
}

PolicyRun evaluate_policy(const SwingContract& contract, const VolumeLadder& ladder,
                          const ContinuationModel& continuation, const PathSet& paths, unsigned threads,
                          bool record_volumes) {
    const QGrid& grid = continuation.grid;
    check_grid(contract, grid);
    const int n = contract.n_dates;
    const CandidatePlan plan = plan_candidates(contract, ladder, grid, default_search(grid));
    const ControlSearch search = default_search(grid);

    PolicyRun run;
    run.cash_flows.assign(paths.n_paths, 0.0);
    if (record_volumes) run.volumes.assign(paths.n_paths * static_cast<std::size_t>(n), 0.0);

    parallel_for(paths.n_paths, threads, [&](std::size_t p) {
        double cumulative = 0.0;
        double cash = 0.0;
        double factor = 1.0;
        std::vector<double> cache;
        std::vector<Candidate> scratch;
        for (int k = 0; k < n; ++k) {
            const bool terminal = k + 1 == n;
            std::span<const Candidate> options;
            const QGrid::Bracket here = grid.locate(k, cumulative);
            if (here.weight == 0.0 && std::abs(grid.at(k)[here.lower] - cumulative) <= ladder.tolerance(k)) {
                cumulative = grid.at(k)[here.lower];
                options = plan.at(k, here.lower);
            } else {
                scratch = candidates(contract, ladder, grid, search, k, cumulative);
                options = scratch;
            }
            const double x = paths.x(p, k);
            const double spot = paths.s(p, k);
            if (!terminal) cache.assign(grid.at(k + 1).size(), std::numeric_limits<double>::quiet_NaN());
            const Decision d = best_candidate(options, spot, contract.strike, contract.discount, terminal,
                                              [&](std::size_t l) {
                                                  double& slot = cache[l];
                                                  if (std::isnan(slot)) slot = continuation.value(k, l, x);
                                                  return slot;
                                              });
            cash += factor * payoff(d.volume, spot, contract.strike);
            factor *= contract.discount;
            if (record_volumes) run.volumes[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = d.volume;
            cumulative += d.volume;
        }
        run.cash_flows[p] = cash;
    });

    const MeanAndError s = summarize(run.cash_flows);
    run.estimate.value = s.mean;
    run.estimate.std_error = s.std_error;
    run.estimate.n_paths = paths.n_paths;
    run.estimate.phase = PricePhase::out_of_sample_forward;
    return run;
}

PriceEstimate forward_valuation(const SwingContract& contract, const VolumeLadder& ladder, const MarketModel& model,
                                const ContinuationModel& continuation, std::size_t n_paths, std::uint64_t seed,
                                unsigned threads) {
    const PathSet paths = simulate_paths(model, contract.n_dates, n_paths, seed, threads);
    PriceEstimate estimate = evaluate_policy(contract, ladder, continuation, paths, threads).estimate;
    if (seed == continuation.seed) {
        estimate.warnings.push_back("forward seed equals the training seed; the estimate is not out-of-sample");
    }
    return estimate;
}

TheoreticalSolution theoretical_sweep(const SwingContract& contract, const VolumeLadder& ladder,
                                      const FiniteStateModel& model, const BasisSpec& basis, const QGrid& grid) {
    basis.validate();
    model.validate();
    check_grid(contract, grid);
    const int n = contract.n_dates;
    const std::size_t states = model.size();
    const std::size_t m = basis.size;
    const CandidatePlan plan = plan_candidates(contract, ladder, grid, default_search(grid));

    TheoreticalSolution sol;
    sol.grid = grid;
    sol.values.resize(static_cast<std::size_t>(n));
    sol.coefficients.resize(static_cast<std::size_t>(std::max(0, n - 1)));
    sol.fitted.resize(sol.coefficients.size());

    {
        const int last = n - 1;
        const std::size_t levels = grid.at(last).size();
        auto& v = sol.values[static_cast<std::size_t>(last)];
        v.resize(states * levels);
        for (std::size_t j = 0; j < states; ++j) {
            for (std::size_t l = 0; l < levels; ++l) {
                v[j * levels + l] = best_candidate(plan.at(last, l), model.spot(last, j), contract.strike,
                                                   contract.discount, true, [](std::size_t) { return 0.0; })
                                        .value;
            }
        }
    }

    Eigen::MatrixXd features(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < states; ++j) {
        features.row(static_cast<Eigen::Index>(j)) = eval_basis(basis, model.states[j]).transpose();
    }

    for (int k = n - 2; k >= 0; --k) {
        const auto kk = static_cast<std::size_t>(k);
        const std::vector<double> law = model.marginal(k);
        const std::size_t next_levels = grid.at(k + 1).size();
        const std::size_t cur_levels = grid.at(k).size();
        const auto& v_next = sol.values[kk + 1];

        GramMatrix gram;
        gram.samples = 0;
        gram.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < states; ++j) {
            const auto row = features.row(static_cast<Eigen::Index>(j));
            gram.values += law[j] * row.transpose() * row;
        }
        const GramSolver solver(gram);
        if (solver.uses_pseudo_inverse()) ++sol.pseudo_inverse_fits;

        const std::vector<bool> reached =
            grid.discrete ? reached_levels(plan, grid, k) : std::vector<bool>(next_levels, true);
        sol.fitted[kk] = reached;
        auto& thetas = sol.coefficients[kk];
        thetas.assign(next_levels, Eigen::VectorXd());
        Eigen::MatrixXd cont = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states),
                                                     static_cast<Eigen::Index>(next_levels));
        std::vector<double> slice(states);
        for (std::size_t l = 0; l < next_levels; ++l) {
            if (!reached[l]) continue;
            for (std::size_t i = 0; i < states; ++i) slice[i] = v_next[i * next_levels + l];
            const std::vector<double> conditional = exact_conditional_expectation(model, k, slice);
            Eigen::VectorXd moment = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
            for (std::size_t j = 0; j < states; ++j) {
                moment += law[j] * conditional[j] * features.row(static_cast<Eigen::Index>(j)).transpose();
            }
            thetas[l] = solver.solve(moment).theta;
            cont.col(static_cast<Eigen::Index>(l)) = features * thetas[l];
        }

        auto& v = sol.values[kk];
        v.resize(states * cur_levels);
        for (std::size_t j = 0; j < states; ++j) {
            for (std::size_t i = 0; i < cur_levels; ++i) {
                v[j * cur_levels + i] =
                    best_candidate(plan.at(k, i), model.spot(k, j), contract.strike, contract.discount, false,
                                   [&](std::size_t l) {
                                       return cont(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
                                   })
                        .value;
            }
        }
    }
    return sol;
}

std::vector<double> state_value_table(const SwingContract& contract, const VolumeLadder& ladder,
                                      const FiniteStateModel& model, const ContinuationModel& continuation, int k) {
    const QGrid& grid = continuation.grid;
    check_grid(contract, grid);
    const CandidatePlan plan = plan_candidates(contract, ladder, grid, default_search(grid));
    const std::size_t levels = grid.at(k).size();
    const bool terminal = k + 1 == contract.n_dates;
    std::vector<double> out(model.size() * levels);
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double x = model.states[j];
        for (std::size_t i = 0; i < levels; ++i) {
            out[j * levels + i] = best_candidate(plan.at(k, i), model.spot(k, j), contract.strike, contract.discount,
                                                 terminal,
                                                 [&](std::size_t l) { return continuation.value(k, l, x); })
                                      .value;
        }
    }
    return out;
}

void write_price_header(std::ostream& out) { out << "engine,phase,value,std_error,n_paths\n"; }

void write_price_row(std::ostream& out, const std::string& engine, const PriceEstimate& e) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu", e.value, e.std_error, e.n_paths);
    out << engine << ',' << to_string(e.phase) << ',' << buf << '\n';
}

}  // namespace swing
