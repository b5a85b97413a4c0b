#include "swing/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "swing/error.hpp"
#include "swing/rng.hpp"

namespace swing {

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "sigmoid"; }

Activation activation_from_string(const std::string& name) {
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "relu") return Activation::relu;
    throw ConfigError("unknown activation '" + name + "'");
}

void MlpSpec::validate() const {
    if (input_dim < 1) throw ConfigError("mlp input_dim must be >= 1");
    if (depth < 2) throw ConfigError("mlp depth must be >= 2");
    if (width < 1) throw ConfigError("mlp width must be >= 1");
    if (param_bound < 0.0 || !std::isfinite(param_bound)) throw ConfigError("mlp param_bound must be >= 0");
}

double MlpSpec::bound() const noexcept { return param_bound > 0.0 ? param_bound : default_param_bound(width); }

std::pair<std::size_t, std::size_t> MlpSpec::layer_shape(std::size_t i) const noexcept {
    const std::size_t fan_in = i == 0 ? input_dim : width;
    const std::size_t fan_out = i + 1 == depth ? 1 : width;
    return {fan_in, fan_out};
}

std::size_t MlpSpec::param_count() const noexcept {
    std::size_t total = 0;
    for (std::size_t i = 0; i < depth; ++i) {
        const auto [fan_in, fan_out] = layer_shape(i);
        total += fan_out * (fan_in + 1);
    }
    return total;
}

double default_param_bound(std::size_t width) noexcept { return 10.0 * std::sqrt(static_cast<double>(width)); }

double MlpParams::norm() const noexcept {
    double acc = 0.0;
    for (double v : theta) acc += v * v;
    return std::sqrt(acc);
}

MlpParams zero_params(const MlpSpec& spec) { return {std::vector<double>(spec.param_count(), 0.0)}; }

MlpParams random_params(const MlpSpec& spec, std::uint64_t seed, double scale) {
    MlpParams out = zero_params(spec);
    CounterRng rng(seed, 0x6d6c70);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < spec.depth; ++i) {
        const auto [fan_in, fan_out] = spec.layer_shape(i);
        const double half = scale / std::sqrt(static_cast<double>(fan_in));
        const std::size_t count = fan_out * (fan_in + 1);
        for (std::size_t j = 0; j < count; ++j) out.theta[offset + j] = half * (2.0 * rng.uniform() - 1.0);
        offset += count;
    }
    return project_params(std::move(out), spec.bound());
}

MlpParams widen_params(const MlpSpec& from, const MlpParams& params, const MlpSpec& to) {
    if (from.depth != to.depth || from.input_dim != to.input_dim || from.activation != to.activation ||
        to.width < from.width) {
        throw DomainError("widen_params needs the same depth/input/activation and a wider target");
    }
    MlpParams out = zero_params(to);
    std::size_t src = 0;
    std::size_t dst = 0;
    for (std::size_t i = 0; i < from.depth; ++i) {
        const auto [in_a, out_a] = from.layer_shape(i);
        const auto [in_b, out_b] = to.layer_shape(i);
        for (std::size_t r = 0; r < out_a; ++r) {
            for (std::size_t c = 0; c < in_a; ++c) out.theta[dst + r * in_b + c] = params.theta[src + r * in_a + c];
        }
        for (std::size_t r = 0; r < out_a; ++r) out.theta[dst + out_b * in_b + r] = params.theta[src + out_a * in_a + r];
        src += out_a * (in_a + 1);
        dst += out_b * (in_b + 1);
    }
    // Sigmoid units emit 1/2 at zero pre-activation, so padded units need a
    // zero outgoing weight, which the zero padding already provides.
    return out;
}

namespace {

double activate(Activation a, double z) noexcept {
    return a == Activation::relu ? (z > 0.0 ? z : 0.0) : 1.0 / (1.0 + std::exp(-z));
}

double activate_slope(Activation a, double z, double out) noexcept {
    return a == Activation::relu ? (z > 0.0 ? 1.0 : 0.0) : out * (1.0 - out);
}

void check_shapes(const MlpSpec& spec, const MlpParams& params) {
    if (params.theta.size() != spec.param_count()) {
        std::ostringstream msg;
        msg << "parameter vector has " << params.theta.size() << " entries, spec needs " << spec.param_count();
        throw DomainError(msg.str());
    }
}

/// Scratch buffers for one forward/backward pass.
struct Workspace {
    std::vector<std::vector<double>> pre;   // z_i per hidden layer
    std::vector<std::vector<double>> post;  // a_0 = x, a_i = phi(z_i)
    std::vector<double> delta;
    std::vector<double> delta_next;
    std::vector<std::size_t> offsets;

    explicit Workspace(const MlpSpec& spec) {
        std::size_t offset = 0;
        for (std::size_t i = 0; i < spec.depth; ++i) {
            offsets.push_back(offset);
            const auto [fan_in, fan_out] = spec.layer_shape(i);
            offset += fan_out * (fan_in + 1);
        }
        pre.assign(spec.depth, std::vector<double>(std::max(spec.width, spec.input_dim)));
        post.assign(spec.depth, std::vector<double>(std::max(spec.width, spec.input_dim)));
        delta.assign(std::max(spec.width, spec.input_dim), 0.0);
        delta_next.assign(delta.size(), 0.0);
    }
};

double forward_pass(const MlpSpec& spec, const double* theta, const double* x, Workspace& ws) {
    std::copy(x, x + spec.input_dim, ws.post[0].begin());
    std::size_t offset = 0;
    for (std::size_t i = 0; i < spec.depth; ++i) {
        const auto [fan_in, fan_out] = spec.layer_shape(i);
        const double* w = theta + offset;
        const double* b = w + fan_in * fan_out;
        const auto& in = ws.post[i];
        if (i + 1 == spec.depth) {
            double out = b[0];
            for (std::size_t c = 0; c < fan_in; ++c) out += w[c] * in[c];
            return out;
        }
        auto& z = ws.pre[i + 1];
        auto& a = ws.post[i + 1];
        for (std::size_t r = 0; r < fan_out; ++r) {
            double acc = b[r];
            const double* wr = w + r * fan_in;
            for (std::size_t c = 0; c < fan_in; ++c) acc += wr[c] * in[c];
            z[r] = acc;
            a[r] = activate(spec.activation, acc);
        }
        offset += fan_out * (fan_in + 1);
    }
    return 0.0;
}

/// Accumulates d(output)/d(theta) * scale into grad.
void backward_pass(const MlpSpec& spec, const double* theta, double scale, Workspace& ws, double* grad) {
    const auto& offsets = ws.offsets;
    ws.delta[0] = scale;
    for (std::size_t i = spec.depth; i-- > 0;) {
        const auto [fan_in, fan_out] = spec.layer_shape(i);
        const double* w = theta + offsets[i];
        double* gw = grad + offsets[i];
        double* gb = gw + fan_in * fan_out;
        const auto& in = ws.post[i];
        for (std::size_t r = 0; r < fan_out; ++r) {
            const double d = ws.delta[r];
            gb[r] += d;
            double* gwr = gw + r * fan_in;
            for (std::size_t c = 0; c < fan_in; ++c) gwr[c] += d * in[c];
        }
        if (i == 0) break;
        for (std::size_t c = 0; c < fan_in; ++c) {
            double acc = 0.0;
            for (std::size_t r = 0; r < fan_out; ++r) acc += w[r * fan_in + c] * ws.delta[r];
            ws.delta_next[c] = acc * activate_slope(spec.activation, ws.pre[i][c], ws.post[i][c]);
        }
        std::swap(ws.delta, ws.delta_next);
    }
}

}  // namespace

double mlp_forward(const MlpSpec& spec, const MlpParams& params, std::span<const double> x) {
    check_shapes(spec, params);
    if (x.size() != spec.input_dim) throw DomainError("input dimension does not match the network");
    Workspace ws(spec);
    return forward_pass(spec, params.theta.data(), x.data(), ws);
}

LossGradient mlp_gradient(const MlpSpec& spec, const MlpParams& params, std::span<const double> xs,
                          std::span<const double> ys) {
    check_shapes(spec, params);
    if (ys.empty()) throw DomainError("mlp_gradient needs a non-empty batch");
    if (xs.size() != ys.size() * spec.input_dim) throw DomainError("batch inputs and targets disagree in size");
    LossGradient out;
    out.gradient.assign(params.theta.size(), 0.0);
    Workspace ws(spec);
    const double inv = 1.0 / static_cast<double>(ys.size());
    for (std::size_t p = 0; p < ys.size(); ++p) {
        const double pred = forward_pass(spec, params.theta.data(), xs.data() + p * spec.input_dim, ws);
        const double r = pred - ys[p];
        out.loss += r * r;
        backward_pass(spec, params.theta.data(), 2.0 * r * inv, ws, out.gradient.data());
    }
    out.loss *= inv;
    return out;
}

double mlp_loss(const MlpSpec& spec, const MlpParams& params, std::span<const double> xs,
                std::span<const double> ys) {
    check_shapes(spec, params);
    if (ys.empty()) throw DomainError("mlp_loss needs a non-empty sample");
    Workspace ws(spec);
    double acc = 0.0;
    for (std::size_t p = 0; p < ys.size(); ++p) {
        const double r = forward_pass(spec, params.theta.data(), xs.data() + p * spec.input_dim, ws) - ys[p];
        acc += r * r;
    }
    return acc / static_cast<double>(ys.size());
}

MlpParams project_params(MlpParams params, double bound) {
    const double n = params.norm();
    if (n > bound) {
        const double s = bound / n;
        for (double& v : params.theta) v *= s;
    }
    return params;
}

void TrainConfig::validate() const {
    if (epochs < 1 || batch_size < 1 || restarts < 1) {
        throw ConfigError("training epochs, batch_size and restarts must be >= 1");
    }
    if (!(step_size > 0.0) || !(step_decay > 0.0) || !(init_scale > 0.0) || !(tolerance >= 0.0)) {
        throw ConfigError("training step_size, step_decay and init_scale must be > 0");
    }
}

namespace {

struct RestartOutcome {
    MlpParams params;
    double loss = INFINITY;
    double initial_loss = INFINITY;
    bool diverged = false;
};

// The output bias is the last parameter. Moving it by mean(y - f(x)) is the
// exact least-squares step in that coordinate, so the loss can only drop.
// Skipped when the shift would leave the parameter ball.
MlpParams center_output(const MlpSpec& spec, MlpParams params, std::span<const double> xs,
                        std::span<const double> ys) {
    const std::size_t dim = spec.input_dim;
    double shift = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        shift += ys[i] - mlp_forward(spec, params, xs.subspan(i * dim, dim));
    }
    shift /= static_cast<double>(ys.size());
    MlpParams moved = params;
    moved.theta.back() += shift;
    return moved.norm() <= spec.bound() ? moved : params;
}

RestartOutcome run_restart(const MlpSpec& spec, const TrainConfig& config, std::span<const double> xs,
                           std::span<const double> ys, MlpParams start, std::uint64_t seed, double step) {
    const double bound = spec.bound();
    const std::size_t n = ys.size();
    const std::size_t batch = std::min(config.batch_size, n);
    const std::size_t dim = spec.input_dim;

    RestartOutcome out;
    MlpParams params = center_output(spec, project_params(std::move(start), bound), xs, ys);
    out.initial_loss = mlp_loss(spec, params, xs, ys);
    out.params = params;
    out.loss = out.initial_loss;
    if (!std::isfinite(out.initial_loss)) {
        out.diverged = true;
        return out;
    }

    std::vector<double> m(params.theta.size(), 0.0);
    std::vector<double> v(params.theta.size(), 0.0);
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    double b1t = 1.0;
    double b2t = 1.0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> bx(batch * dim);
    std::vector<double> by(batch);
    double previous = out.loss;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        CounterRng rng(seed, 0x65706f6368, epoch);
        for (std::size_t i = n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.next_u64() % i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start_idx = 0; start_idx + batch <= n; start_idx += batch) {
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t src = order[start_idx + b];
                std::copy_n(xs.begin() + static_cast<std::ptrdiff_t>(src * dim), dim, bx.begin() + static_cast<std::ptrdiff_t>(b * dim));
                by[b] = ys[src];
            }
            const LossGradient lg = mlp_gradient(spec, params, bx, by);
            b1t *= beta1;
            b2t *= beta2;
            for (std::size_t i = 0; i < params.theta.size(); ++i) {
                const double g = lg.gradient[i];
                m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
                params.theta[i] -= step * (m[i] / (1.0 - b1t)) / (std::sqrt(v[i] / (1.0 - b2t)) + eps);
            }
            params = project_params(std::move(params), bound);
        }
        const double loss = mlp_loss(spec, params, xs, ys);
        if (!std::isfinite(loss)) {
            out.diverged = true;
            return out;
        }
        if (loss < out.loss) {
            out.loss = loss;
            out.params = params;
        }
        if (std::abs(previous - loss) < config.tolerance * std::max(1.0, previous)) break;
        previous = loss;
        step *= config.step_decay;
    }
    return out;
}

}  // namespace

TrainResult train_continuation(const MlpSpec& spec, const TrainConfig& config, std::span<const double> xs,
                               std::span<const double> ys, const std::optional<MlpParams>& warm_start) {
    spec.validate();
    config.validate();
    if (ys.empty()) throw DomainError("train_continuation needs samples");
    if (xs.size() != ys.size() * spec.input_dim) throw DomainError("training inputs and targets disagree in size");
    for (double y : ys) {
        if (!std::isfinite(y)) throw NumericalError("non-finite regression target");
    }

    TrainResult result;
    result.loss = INFINITY;
    bool any = false;
    for (std::size_t r = 0; r < config.restarts; ++r) {
        const std::uint64_t seed = derive_seed(config.seed, r);
        MlpParams start = (r == 0 && warm_start) ? *warm_start : random_params(spec, seed, config.init_scale);
        RestartOutcome outcome;
        double step = config.step_size;
        for (int attempt = 0; attempt < 4; ++attempt, step *= 0.5) {
            outcome = run_restart(spec, config, xs, ys, start, seed, step);
            if (!outcome.diverged) break;
        }
        result.restart_losses.push_back(outcome.diverged ? INFINITY : outcome.loss);
        if (outcome.diverged) continue;
        if (!any || outcome.loss < result.loss) {
            result.params = std::move(outcome.params);
            result.loss = outcome.loss;
            result.initial_loss = outcome.initial_loss;
            any = true;
        }
    }
    if (!any) throw NumericalError("all training restarts diverged");
    return result;
}

}  // namespace swing
