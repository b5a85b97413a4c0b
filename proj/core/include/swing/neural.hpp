#pragma once

#include <vector>

#include "swing/lsmc.hpp"
#include "swing/mlp.hpp"

namespace swing {

struct NeuralSweepResult {
    ContinuationModel model;
    ValueSurface date0;
    PriceEstimate in_sample;
    /// Best-of-restarts full-sample training loss per (k, level of k+1);
    /// NaN where the level was not fitted.
    std::vector<std::vector<double>> losses;
    /// Loss of every restart per (k, level), for dispersion diagnostics.
    std::vector<std::vector<std::vector<double>>> restart_losses;
};

/// Backward induction with one bounded network per (date, volume level),
/// trained on (X_k, V_{k+1}(X_{k+1}, Q)) pairs. Requires a discrete grid
/// (integer volumes, bang-bang maximization). Each (k, Q) network is warm
/// started from the (k, Q+1) network.
NeuralSweepResult nn_backward_sweep(const SwingContract& contract, const VolumeLadder& ladder, const PathSet& paths,
                                    const MlpSpec& spec, const TrainConfig& config, const QGrid& grid,
                                    unsigned threads = 1);

}  // namespace swing
