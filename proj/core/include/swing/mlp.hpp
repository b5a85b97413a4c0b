#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace swing {

enum class Activation { sigmoid, relu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Feed-forward network x -> W_I phi(... phi(W_1 x + b_1) ...) + b_I with
/// `depth` affine layers, `width` units per hidden layer and a scalar
/// identity output. Parameters are confined to the ball |theta| <= param_bound.
struct MlpSpec {
    std::size_t input_dim = 1;
    std::size_t depth = 2;
    std::size_t width = 8;
    Activation activation = Activation::sigmoid;
    double param_bound = 0.0;  ///< gamma_m; 0 selects default_param_bound(width)

    void validate() const;
    [[nodiscard]] double bound() const noexcept;
    /// (fan_in, fan_out) of affine layer i, 0-based.
    [[nodiscard]] std::pair<std::size_t, std::size_t> layer_shape(std::size_t i) const noexcept;
    [[nodiscard]] std::size_t param_count() const noexcept;

    friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// gamma_m = 10 sqrt(m): increasing and unbounded in the width.
double default_param_bound(std::size_t width) noexcept;

/// All weights and biases flattened layer by layer (W_i row-major, then b_i).
struct MlpParams {
    std::vector<double> theta;

    [[nodiscard]] double norm() const noexcept;
    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

MlpParams zero_params(const MlpSpec& spec);

/// Centered uniform initialization with half-width scale / sqrt(fan_in).
MlpParams random_params(const MlpSpec& spec, std::uint64_t seed, double scale = 1.0);

/// Embeds a narrower network into a wider one of the same depth by padding
/// with zero units; the represented function is unchanged.
MlpParams widen_params(const MlpSpec& from, const MlpParams& params, const MlpSpec& to);

double mlp_forward(const MlpSpec& spec, const MlpParams& params, std::span<const double> x);

/// Mean squared error and its exact gradient over a batch. `xs` holds
/// `ys.size()` inputs of spec.input_dim values each.
struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};
LossGradient mlp_gradient(const MlpSpec& spec, const MlpParams& params, std::span<const double> xs,
                          std::span<const double> ys);

/// Mean squared error only.
double mlp_loss(const MlpSpec& spec, const MlpParams& params, std::span<const double> xs,
                std::span<const double> ys);

/// Euclidean projection onto the ball of radius `bound`.
MlpParams project_params(MlpParams params, double bound);

/// Projected minibatch optimizer settings.
struct TrainConfig {
    std::size_t epochs = 60;
    std::size_t batch_size = 256;
    double step_size = 0.02;
    double step_decay = 0.96;  ///< geometric decay per epoch
    double init_scale = 1.0;
    std::size_t restarts = 5;
    double tolerance = 1e-12;  ///< stop when an epoch improves the loss by less
    std::uint64_t seed = 1;

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainResult {
    MlpParams params;
    double loss = 0.0;          ///< full-sample MSE of `params`
    double initial_loss = 0.0;  ///< full-sample MSE of the best restart's start point
    std::vector<double> restart_losses;
};

/// Minimizes the full-sample MSE over the parameter ball with projected
/// minibatch Adam steps, across `config.restarts` starts (the first one from
/// `warm_start` when given), and returns the best restart. Each restart keeps
/// its best epoch, so the returned loss never exceeds that restart's starting
/// loss. Throws NumericalError when every restart diverges.
TrainResult train_continuation(const MlpSpec& spec, const TrainConfig& config, std::span<const double> xs,
                               std::span<const double> ys, const std::optional<MlpParams>& warm_start = {});

}  // namespace swing
