#include "swing/neural.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "swing/error.hpp"
#include "swing/parallel.hpp"
#include "swing/rng.hpp"

namespace swing {

NeuralSweepResult nn_backward_sweep(const SwingContract& contract, const VolumeLadder& ladder, const PathSet& paths,
                                    const MlpSpec& spec, const TrainConfig& config, const QGrid& grid,
                                    unsigned threads) {
    spec.validate();
    config.validate();
    if (!grid.discrete) throw DomainError("the neural engine runs on discrete (integer) volume grids only");
    if (spec.input_dim != 1) throw DomainError("the neural engine expects a scalar state");
    if (grid.n_dates() != contract.n_dates) throw DomainError("grid does not match the contract's date count");
    const int n = contract.n_dates;
    const std::size_t n_paths = paths.n_paths;
    const CandidatePlan plan = plan_candidates(contract, ladder, grid, default_search(grid));

    NeuralSweepResult result;
    ContinuationModel& model = result.model;
    model.kind = ContinuationKind::mlp;
    model.network = spec;
    model.network.param_bound = spec.bound();
    model.grid = grid;
    model.sample_count = n_paths;
    model.seed = paths.seed;
    model.contract_hash = contract_hash(contract);
    const auto fits = static_cast<std::size_t>(std::max(0, n - 1));
    model.networks.resize(fits);
    model.fitted.resize(fits);
    result.losses.resize(fits);
    result.restart_losses.resize(fits);

    ValueSurface next = terminal_values(contract, ladder, paths, grid);
    std::vector<double> xs(n_paths);
    std::vector<double> ys(n_paths);
    std::vector<double> continuation;

    for (int k = n - 2; k >= 0; --k) {
        const auto kk = static_cast<std::size_t>(k);
        const std::size_t next_levels = grid.at(k + 1).size();
        const std::size_t cur_levels = grid.at(k).size();
        const std::vector<bool> reached = reached_levels(plan, grid, k);
        for (std::size_t p = 0; p < n_paths; ++p) xs[p] = paths.x(p, k);

        model.networks[kk].assign(next_levels, MlpParams{});
        model.fitted[kk] = reached;
        result.losses[kk].assign(next_levels, std::numeric_limits<double>::quiet_NaN());
        result.restart_losses[kk].assign(next_levels, {});

        std::optional<MlpParams> warm;
        for (std::size_t l = next_levels; l-- > 0;) {
            if (!reached[l]) continue;
            for (std::size_t p = 0; p < n_paths; ++p) {
                ys[p] = next.at(p, l);
                if (!std::isfinite(ys[p])) {
                    std::ostringstream msg;
                    msg << "non-finite training target at date " << k + 1 << ", Q = " << grid.at(k + 1)[l];
                    throw NumericalError(msg.str());
                }
            }
            TrainConfig job = config;
            job.seed = derive_seed(config.seed, (static_cast<std::uint64_t>(k) << 32) | l);
            TrainResult trained = train_continuation(spec, job, xs, ys, warm);
            result.losses[kk][l] = trained.loss;
            result.restart_losses[kk][l] = trained.restart_losses;
            warm = trained.params;
            model.networks[kk][l] = std::move(trained.params);
        }

        continuation.assign(n_paths * next_levels, 0.0);
        ValueSurface current;
        current.date = k;
        current.levels = grid.at(k);
        current.n_paths = n_paths;
        current.values.resize(n_paths * cur_levels);
        parallel_for(n_paths, threads, [&](std::size_t p) {
            double* row = continuation.data() + p * next_levels;
            for (std::size_t l = 0; l < next_levels; ++l) {
                if (reached[l]) row[l] = mlp_forward(spec, model.networks[kk][l], std::span<const double>(&xs[p], 1));
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
    result.in_sample.value = result.date0.mean(0);
    result.in_sample.n_paths = n_paths;
    result.in_sample.phase = PricePhase::in_sample_backward;
    result.in_sample.std_error = evaluate_policy(contract, ladder, model, paths, threads).estimate.std_error;
    return result;
}

}  // namespace swing
