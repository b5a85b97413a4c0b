#include "swing/grid.hpp"

#include <algorithm>
#include <sstream>

#include "swing/error.hpp"

namespace swing {

QGrid::Bracket QGrid::locate(int k, double cumulative) const {
    const auto& lv = at(k);
    const double scale = std::max(1.0, std::abs(lv.back()));
    const double tol = 1e-9 * scale;
    if (cumulative < lv.front() - tol || cumulative > lv.back() + tol) {
        std::ostringstream msg;
        msg << "cumulative volume " << cumulative << " outside grid range [" << lv.front() << ", " << lv.back()
            << "] at date " << k;
        throw DomainError(msg.str());
    }
    const auto it = std::lower_bound(lv.begin(), lv.end(), cumulative);
    auto idx = static_cast<std::size_t>(it - lv.begin());
    // Snap to an exact level when within tolerance.
    if (idx < lv.size() && std::abs(lv[idx] - cumulative) <= tol) return {idx, idx, 0.0};
    if (idx > 0 && std::abs(lv[idx - 1] - cumulative) <= tol) return {idx - 1, idx - 1, 0.0};
    if (idx == 0) return {0, 0, 0.0};
    if (idx == lv.size()) return {lv.size() - 1, lv.size() - 1, 0.0};
    const double w = (cumulative - lv[idx - 1]) / (lv[idx] - lv[idx - 1]);
    return {idx - 1, idx, w};
}

QGrid make_grid(const SwingContract& contract, const VolumeLadder& ladder, int density) {
    const int n = contract.n_dates;
    QGrid grid;
    grid.discrete = ladder.discrete;
    grid.density = density;
    grid.levels.resize(static_cast<std::size_t>(n));
    if (ladder.discrete) {
        for (int k = 0; k < n; ++k) grid.levels[static_cast<std::size_t>(k)] = ladder.integer_levels(k);
        return grid;
    }
    if (density < 2) throw ConfigError("grid density must be >= 2 in continuous mode");
    double reference = 0.0;
    for (int k = 0; k < n; ++k) reference = std::max(reference, ladder.up[static_cast<std::size_t>(k)]);
    const double step = reference / (density - 1);
    for (int k = 0; k < n; ++k) {
        const double lo = ladder.down[static_cast<std::size_t>(k)];
        const double hi = ladder.up[static_cast<std::size_t>(k)];
        auto& lv = grid.levels[static_cast<std::size_t>(k)];
        lv.push_back(lo);
        if (step > 0.0) {
            const double tol = 1e-9 * std::max(1.0, hi);
            for (long i = static_cast<long>(std::ceil(lo / step)); ; ++i) {
                const double q = static_cast<double>(i) * step;
                if (q >= hi - tol) break;
                if (q > lo + tol) lv.push_back(q);
            }
        }
        if (hi > lo + 1e-9 * std::max(1.0, hi)) lv.push_back(hi);
    }
    return grid;
}

ControlSearch default_search(const QGrid& grid) {
    return grid.discrete ? ControlSearch{} : ControlSearch{0, true};
}

std::vector<Candidate> candidates(const SwingContract& contract, const VolumeLadder& ladder, const QGrid& grid,
                                  const ControlSearch& search, int k, double cumulative) {
    const AdmissibleInterval interval = admissible_interval(contract, ladder, k, cumulative);
    std::vector<double> volumes = bang_bang_candidates(interval);
    if (search.control_points > 1 && !interval.degenerate()) {
        const double width = interval.hi - interval.lo;
        for (int i = 1; i + 1 < search.control_points; ++i) {
            volumes.push_back(interval.lo + width * i / (search.control_points - 1));
        }
    }
    const bool terminal = k + 1 >= grid.n_dates();
    if (search.include_next_levels && !terminal && !interval.degenerate()) {
        for (double level : grid.at(k + 1)) {
            const double q = level - cumulative;
            if (q > interval.lo && q < interval.hi) volumes.push_back(q);
        }
    }
    std::sort(volumes.begin(), volumes.end());
    volumes.erase(std::unique(volumes.begin(), volumes.end()), volumes.end());

    std::vector<Candidate> out;
    out.reserve(volumes.size());
    for (double q : volumes) {
        Candidate c{q, {}};
        if (!terminal) c.next = grid.locate(k + 1, cumulative + q);
        out.push_back(c);
    }
    return out;
}

CandidatePlan plan_candidates(const SwingContract& contract, const VolumeLadder& ladder, const QGrid& grid,
                              const ControlSearch& search) {
    CandidatePlan plan;
    plan.by_level.resize(static_cast<std::size_t>(grid.n_dates()));
    for (int k = 0; k < grid.n_dates(); ++k) {
        auto& slot = plan.by_level[static_cast<std::size_t>(k)];
        for (double level : grid.at(k)) slot.push_back(candidates(contract, ladder, grid, search, k, level));
    }
    return plan;
}

std::vector<bool> reached_levels(const CandidatePlan& plan, const QGrid& grid, int k) {
    std::vector<bool> reached(grid.at(k + 1).size(), false);
    for (const auto& options : plan.by_level[static_cast<std::size_t>(k)]) {
        for (const Candidate& c : options) {
            if (c.next.weight < 1.0) reached[c.next.lower] = true;
            if (c.next.weight > 0.0) reached[c.next.upper] = true;
        }
    }
    return reached;
}

}  // namespace swing
