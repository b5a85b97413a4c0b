#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "swing/contract.hpp"
#include "swing/market.hpp"

namespace swing {

/// Cumulative-volume levels per date k = 0..n-1.
///
/// Discrete ladders use exactly the integers of T_k. Continuous ladders use a
/// common lattice of step h = Q_ref / (density - 1), Q_ref = max_k Q_up[k],
/// clipped to [Q_down[k], Q_up[k]] with both endpoints added, so that lattice
/// points of consecutive dates line up.
struct QGrid {
    std::vector<std::vector<double>> levels;
    bool discrete = false;
    int density = 0;

    [[nodiscard]] int n_dates() const noexcept { return static_cast<int>(levels.size()); }
    [[nodiscard]] const std::vector<double>& at(int k) const { return levels[static_cast<std::size_t>(k)]; }

    /// Linear-interpolation bracket of `cumulative` among the levels of date k.
    struct Bracket {
        std::size_t lower = 0;
        std::size_t upper = 0;
        double weight = 0.0;  ///< weight of `upper`
    };
    /// Throws DomainError when `cumulative` lies outside the level range by
    /// more than the ladder tolerance.
    [[nodiscard]] Bracket locate(int k, double cumulative) const;
};

inline constexpr int kDefaultGridDensity = 51;

QGrid make_grid(const SwingContract& contract, const VolumeLadder& ladder, int density = kDefaultGridDensity);

/// Which purchases are compared when maximizing over Adm(t_k, Q). The two
/// interval endpoints are always included.
struct ControlSearch {
    /// Extra equally spaced points across the interval (including endpoints);
    /// 0 disables the control grid.
    int control_points = 0;
    /// Add every purchase that lands exactly on a level of date k+1; with
    /// linear interpolation in Q these are the only interior breakpoints.
    bool include_next_levels = false;
};

/// Bang-bang search for discrete grids, breakpoint search otherwise.
ControlSearch default_search(const QGrid& grid);

/// One candidate purchase with its interpolation bracket at date k+1.
struct Candidate {
    double volume = 0.0;
    QGrid::Bracket next;
};

/// Candidate purchases at (k, Q), ascending in volume.
std::vector<Candidate> candidates(const SwingContract& contract, const VolumeLadder& ladder, const QGrid& grid,
                                  const ControlSearch& search, int k, double cumulative);

/// Precomputed candidates for every (date, level) of a grid.
struct CandidatePlan {
    std::vector<std::vector<std::vector<Candidate>>> by_level;

    [[nodiscard]] std::span<const Candidate> at(int k, std::size_t level) const {
        return by_level[static_cast<std::size_t>(k)][level];
    }
};

CandidatePlan plan_candidates(const SwingContract& contract, const VolumeLadder& ladder, const QGrid& grid,
                              const ControlSearch& search);

/// Levels of date k+1 that some candidate from date k touches with non-zero
/// interpolation weight. Unreached levels need no continuation estimate.
std::vector<bool> reached_levels(const CandidatePlan& plan, const QGrid& grid, int k);

/// Outcome of a single Bellman maximization.
struct Decision {
    double value = -INFINITY;
    double volume = 0.0;
    /// Another candidate attains the value within 1e-12 (set-valued argmax).
    bool tie = false;
};

/// max over candidates of payoff(q, spot) + discount * C(Q + q), where
/// C interpolates `continuation(level)` over the levels of date k+1. Pass
/// `terminal = true` at the last date (no continuation). Ties go to the
/// larger volume.
template <typename ContinuationAtLevel>
Decision best_candidate(std::span<const Candidate> options, double spot, double strike, double discount,
                        bool terminal, ContinuationAtLevel&& continuation) {
    Decision best;
    double runner_up = -INFINITY;
    for (const Candidate& c : options) {
        double value = payoff(c.volume, spot, strike);
        if (!terminal) {
            const double lower = continuation(c.next.lower);
            const double cont = c.next.weight == 0.0
                                    ? lower
                                    : lower + c.next.weight * (continuation(c.next.upper) - lower);
            value += discount * cont;
        }
        if (value >= best.value) {
            runner_up = best.value;
            best.value = value;
            best.volume = c.volume;
        } else if (value > runner_up) {
            runner_up = value;
        }
    }
    best.tie = std::isfinite(runner_up) &&
               best.value - runner_up <= 1e-12 * std::fmax(1.0, std::fabs(best.value));
    return best;
}

}  // namespace swing
