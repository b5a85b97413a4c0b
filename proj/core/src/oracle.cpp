#include "swing/oracle.hpp"

#include <cstdio>
#include <ostream>

#include "swing/error.hpp"

namespace swing {

ControlSearch oracle_search(const QGrid& grid) {
    return grid.discrete ? ControlSearch{} : ControlSearch{kOracleControlPoints, true};
}

ExactValueTable solve_exact(const SwingContract& contract, const VolumeLadder& ladder, const FiniteStateModel& model,
                            const QGrid& grid, const std::optional<ControlSearch>& search) {
    model.validate();
    if (grid.n_dates() != contract.n_dates) throw DomainError("grid does not match the contract's date count");
    if (static_cast<int>(model.spot_values.size()) != 1 &&
        static_cast<int>(model.spot_values.size()) < contract.n_dates) {
        throw DomainError("spot_values cover fewer dates than the contract");
    }
    const int n = contract.n_dates;
    const std::size_t states = model.size();
    const CandidatePlan plan = plan_candidates(contract, ladder, grid, search.value_or(oracle_search(grid)));

    ExactValueTable table;
    table.grid = grid;
    table.n_states = states;
    table.values.resize(static_cast<std::size_t>(n));
    table.controls.resize(static_cast<std::size_t>(n));
    table.ties.resize(static_cast<std::size_t>(n));

    std::vector<double> cont;  // [j * L_{k+1} + l]
    std::vector<double> slice(states);
    for (int k = n - 1; k >= 0; --k) {
        const auto kk = static_cast<std::size_t>(k);
        const bool terminal = k + 1 == n;
        const std::size_t levels = grid.at(k).size();
        if (!terminal) {
            const std::size_t next_levels = grid.at(k + 1).size();
            const auto& v_next = table.values[kk + 1];
            cont.assign(states * next_levels, 0.0);
            for (std::size_t l = 0; l < next_levels; ++l) {
                for (std::size_t i = 0; i < states; ++i) slice[i] = v_next[i * next_levels + l];
                const std::vector<double> expected = exact_conditional_expectation(model, k, slice);
                for (std::size_t j = 0; j < states; ++j) cont[j * next_levels + l] = expected[j];
            }
        }
        auto& v = table.values[kk];
        auto& c = table.controls[kk];
        auto& t = table.ties[kk];
        v.resize(states * levels);
        c.resize(states * levels);
        t.resize(states * levels);
        const std::size_t next_levels = terminal ? 0 : grid.at(k + 1).size();
        for (std::size_t j = 0; j < states; ++j) {
            const double* row = terminal ? nullptr : cont.data() + j * next_levels;
            for (std::size_t l = 0; l < levels; ++l) {
                const Decision d = best_candidate(plan.at(k, l), model.spot(k, j), contract.strike, contract.discount,
                                                  terminal, [row](std::size_t i) { return row[i]; });
                v[j * levels + l] = d.value;
                c[j * levels + l] = d.volume;
                t[j * levels + l] = d.tie ? 1 : 0;
            }
        }
    }
    for (std::size_t j = 0; j < states; ++j) table.price += model.initial[j] * table.value(0, j, 0);
    return table;
}

std::vector<std::pair<double, double>> continuity_profile(const ExactValueTable& table, int k, std::size_t state) {
    if (k < 0 || k >= table.grid.n_dates() || state >= table.n_states) {
        throw DomainError("continuity_profile index out of range");
    }
    const auto& levels = table.grid.at(k);
    std::vector<std::pair<double, double>> out;
    out.reserve(levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) out.emplace_back(levels[l], table.value(k, state, l));
    return out;
}

void write_table_csv(std::ostream& out, const ExactValueTable& table) {
    out << "date,state,Q,value,control,tie\n";
    char buf[160];
    for (int k = 0; k < table.grid.n_dates(); ++k) {
        const auto& levels = table.grid.at(k);
        for (std::size_t j = 0; j < table.n_states; ++j) {
            for (std::size_t l = 0; l < levels.size(); ++l) {
                const std::size_t i = table.index(k, j, l);
                std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g,%d\n", k, j, levels[l],
                              table.values[static_cast<std::size_t>(k)][i],
                              table.controls[static_cast<std::size_t>(k)][i],
                              static_cast<int>(table.ties[static_cast<std::size_t>(k)][i]));
                out << buf;
            }
        }
    }
}

}  // namespace swing
