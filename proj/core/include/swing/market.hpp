#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace swing {

/// Simulated trajectories: N paths of the Markov state X and the spot S over
/// n dates, stored row-major by path.
struct PathSet {
    std::size_t n_paths = 0;
    int n_dates = 0;
    std::uint64_t seed = 0;
    std::vector<double> state;
    std::vector<double> spot;
    /// Chain state index per entry; filled for finite-state models only.
    std::vector<int> state_index;

    [[nodiscard]] std::size_t at(std::size_t path, int date) const noexcept {
        return path * static_cast<std::size_t>(n_dates) + static_cast<std::size_t>(date);
    }
    [[nodiscard]] double x(std::size_t path, int date) const noexcept { return state[at(path, date)]; }
    [[nodiscard]] double s(std::size_t path, int date) const noexcept { return spot[at(path, date)]; }
};

/// Standardized one-factor Gaussian (discretized Ornstein-Uhlenbeck) model.
///
/// The latent log-deviation follows Y_k = a Y_{k-1} + vol * eps_k with
/// a = exp(-mean_reversion) and Y_{-1} = x0. The exposed state is the
/// per-date standardization X_k = (Y_k - E Y_k) / sd_k, which is exactly
/// N(0, 1) at every date, and the spot is
/// S_k = F_k * exp(sd_k * clamp(X_k) - sd_k^2 / 2).
struct GaussianOneFactorModel {
    double mean_reversion = 0.0;
    double vol = 0.2;
    double x0 = 0.0;
    std::vector<double> forward_curve;  ///< one positive level per date
    double state_bound = 6.0;

    void validate(int n_dates) const;

    [[nodiscard]] double latent_mean(int k) const;
    [[nodiscard]] double latent_sd(int k) const;
    /// g_k(x).
    [[nodiscard]] double spot(int k, double x) const;
};

/// Finite-state Markov chain on J real states with exactly computable
/// conditional expectations.
struct FiniteStateModel {
    std::vector<double> states;
    /// Transition matrices for steps k -> k+1; a single matrix is reused for
    /// every step.
    std::vector<Eigen::MatrixXd> transitions;
    std::vector<double> initial;
    /// Spot level per date and state; a single row is reused for every date.
    std::vector<std::vector<double>> spot_values;

    [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
    void validate() const;

    [[nodiscard]] const Eigen::MatrixXd& transition(int k) const;
    [[nodiscard]] double spot(int k, std::size_t j) const;
    /// Distribution of the chain at date k.
    [[nodiscard]] std::vector<double> marginal(int k) const;
};

/// Either supported price model.
using MarketModel = std::variant<GaussianOneFactorModel, FiniteStateModel>;

/// Uniform simulation entry point. `threads` only affects speed: every
/// (path, date) pair draws from its own keyed random stream.
PathSet simulate_paths(const GaussianOneFactorModel& model, int n_dates, std::size_t n_paths,
                       std::uint64_t seed, unsigned threads = 1);
PathSet simulate_paths(const FiniteStateModel& model, int n_dates, std::size_t n_paths,
                       std::uint64_t seed, unsigned threads = 1);
PathSet simulate_paths(const MarketModel& model, int n_dates, std::size_t n_paths, std::uint64_t seed,
                       unsigned threads = 1);

/// Algebraic profit of buying `volume` at `spot` against `strike`.
constexpr double payoff(double volume, double spot, double strike) noexcept {
    return volume * (spot - strike);
}

/// E[values_next(X_{k+1}) | X_k = x_j] for every state j.
std::vector<double> exact_conditional_expectation(const FiniteStateModel& model, int k,
                                                  std::span<const double> values_next);

/// Columnar export: path,date,state,spot.
void write_paths_csv(std::ostream& out, const PathSet& paths);

}  // namespace swing
