#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "swing/contract.hpp"
#include "swing/grid.hpp"
#include "swing/market.hpp"

namespace swing {

/// Exact solution of the dynamic programming equation on a finite chain.
struct ExactValueTable {
    QGrid grid;
    std::size_t n_states = 0;
    /// values[k][j * L_k + l] = V_k(x_j, Q_l); controls holds the maximizer
    /// and ties flags another maximizer within 1e-12.
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> controls;
    std::vector<std::vector<std::uint8_t>> ties;
    double price = 0.0;  ///< sum_j initial_j V_0(x_j, 0)

    [[nodiscard]] std::size_t index(int k, std::size_t state, std::size_t level) const {
        return state * grid.at(k).size() + level;
    }
    [[nodiscard]] double value(int k, std::size_t state, std::size_t level) const {
        return values[static_cast<std::size_t>(k)][index(k, state, level)];
    }
};

inline constexpr int kOracleControlPoints = 1001;

/// Bang-bang search on discrete grids; 1001 control points plus every
/// next-date level on continuous grids.
ControlSearch oracle_search(const QGrid& grid);

ExactValueTable solve_exact(const SwingContract& contract, const VolumeLadder& ladder, const FiniteStateModel& model,
                            const QGrid& grid, const std::optional<ControlSearch>& search = {});

/// (Q, V_k(x_j, Q)) over the levels of date k.
std::vector<std::pair<double, double>> continuity_profile(const ExactValueTable& table, int k, std::size_t state);

/// date,state,Q,value,control,tie
void write_table_csv(std::ostream& out, const ExactValueTable& table);

}  // namespace swing
