#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "swing/basis.hpp"
#include "swing/continuation.hpp"
#include "swing/contract.hpp"
#include "swing/grid.hpp"
#include "swing/market.hpp"

namespace swing {

/// Per-path values at one date: values[p * levels.size() + l] = V_k(X^p_k, Q_l).
struct ValueSurface {
    int date = 0;
    std::vector<double> levels;
    std::size_t n_paths = 0;
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t path, std::size_t level) const {
        return values[path * levels.size() + level];
    }
    [[nodiscard]] double mean(std::size_t level) const;
    [[nodiscard]] double std_dev(std::size_t level) const;
};

enum class PricePhase { in_sample_backward, out_of_sample_forward };
std::string to_string(PricePhase phase);

struct PriceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    PricePhase phase = PricePhase::out_of_sample_forward;
    std::vector<std::string> warnings;
};

/// V_{n-1}(X^p, Q) = max over {lo, hi} of payoff; the payoff is linear in q.
ValueSurface terminal_values(const SwingContract& contract, const VolumeLadder& ladder, const PathSet& paths,
                             const QGrid& grid);

struct BackwardOptions {
    unsigned threads = 1;
    /// Replace the solved Gram system by theta = moment, valid when the basis
    /// is orthonormal under the state law.
    bool identity_gram = false;
    ControlSearch search{};
    bool use_default_search = true;
    /// Re-run the fitted policy on the training paths for the standard error
    /// of the in-sample estimate.
    bool realized_std_error = true;
};

struct BackwardResult {
    ContinuationModel model;
    ValueSurface date0;
    /// Date-0 mean of V at Q = 0. The standard error is that of the realized
    /// cash flows of the fitted policy on the training paths.
    PriceEstimate in_sample;
    std::size_t pseudo_inverse_fits = 0;
};

/// Least-squares backward induction on the training paths.
/// Throws DomainError when N < m and NumericalError on non-finite targets.
BackwardResult backward_sweep(const SwingContract& contract, const VolumeLadder& ladder, const PathSet& paths,
                              const BasisSpec& basis, const QGrid& grid, const BackwardOptions& options = {});

/// Realized cash flows of the policy induced by `continuation` on `paths`.
struct PolicyRun {
    PriceEstimate estimate;
    std::vector<double> cash_flows;  ///< per path, discounted
    std::vector<double> volumes;     ///< per path and date, row-major (when recorded)
};

PolicyRun evaluate_policy(const SwingContract& contract, const VolumeLadder& ladder,
                          const ContinuationModel& continuation, const PathSet& paths, unsigned threads = 1,
                          bool record_volumes = false);

/// Out-of-sample valuation on fresh paths simulated with `seed`. A seed equal
/// to the training seed is reported as a warning on the estimate.
PriceEstimate forward_valuation(const SwingContract& contract, const VolumeLadder& ladder, const MarketModel& model,
                                const ContinuationModel& continuation, std::size_t n_paths, std::uint64_t seed,
                                unsigned threads = 1);

/// Exact-expectation least-squares approximation V^m on a finite chain.
struct TheoreticalSolution {
    QGrid grid;
    /// values[k][j * L_k + l] = V^m_k(x_j, Q_l).
    std::vector<std::vector<double>> values;
    /// coefficients[k][l]: theta at date k for level l of date k+1.
    std::vector<std::vector<Eigen::VectorXd>> coefficients;
    std::vector<std::vector<bool>> fitted;
    std::size_t pseudo_inverse_fits = 0;

    [[nodiscard]] double value(int k, std::size_t state, std::size_t level) const {
        const auto& row = values[static_cast<std::size_t>(k)];
        return row[state * grid.at(k).size() + level];
    }
};

TheoreticalSolution theoretical_sweep(const SwingContract& contract, const VolumeLadder& ladder,
                                      const FiniteStateModel& model, const BasisSpec& basis, const QGrid& grid);

/// V^{m,N}_k(x_j, Q_l) of a fitted continuation model evaluated at every chain
/// state: result[j * L_k + l].
std::vector<double> state_value_table(const SwingContract& contract, const VolumeLadder& ladder,
                                      const FiniteStateModel& model, const ContinuationModel& continuation, int k);

/// Delimited text row writers.
void write_price_header(std::ostream& out);
void write_price_row(std::ostream& out, const std::string& engine, const PriceEstimate& estimate);

}  // namespace swing
