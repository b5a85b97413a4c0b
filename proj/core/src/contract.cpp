#include "swing/contract.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swing/error.hpp"

namespace swing {
namespace {

bool is_whole(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

void SwingContract::validate() const {
    std::ostringstream msg;
    if (n_dates < 1) {
        msg << "n_dates must be >= 1 (got " << n_dates << ")";
        throw ConfigError(msg.str());
    }
    for (double v : {strike, local_min, local_max, global_min, global_max, discount}) {
        if (!std::isfinite(v)) throw ConfigError("contract fields must be finite");
    }
    if (local_min < 0.0) throw ConfigError("q_min must be >= 0");
    if (local_min > local_max) {
        msg << "q_min (" << local_min << ") must not exceed q_max (" << local_max << ")";
        throw ConfigError(msg.str());
    }
    if (global_min < 0.0) throw ConfigError("Q_min must be >= 0");
    if (global_min > global_max) {
        msg << "Q_min (" << global_min << ") must not exceed Q_max (" << global_max << ")";
        throw ConfigError(msg.str());
    }
    if (!(discount > 0.0 && discount <= 1.0)) {
        msg << "discount must lie in (0, 1] (got " << discount << ")";
        throw ConfigError(msg.str());
    }
    const double n = n_dates;
    if (n * local_min > global_max) {
        msg << "infeasible contract: n_dates*q_min = " << n * local_min << " > Q_max = " << global_max;
        throw FeasibilityError(msg.str());
    }
    if (n * local_max < global_min) {
        msg << "infeasible contract: n_dates*q_max = " << n * local_max << " < Q_min = " << global_min;
        throw FeasibilityError(msg.str());
    }
}

bool SwingContract::bang_bang_setting() const noexcept {
    if (!(is_whole(local_min) && is_whole(local_max) && is_whole(global_min) && is_whole(global_max))) {
        return false;
    }
    const double width = local_max - local_min;
    const double span = global_max - global_min;
    if (width == 0.0) return span == 0.0;
    return std::fmod(span, width) == 0.0;
}

double VolumeLadder::tolerance(int k) const noexcept {
    return 1e-9 * std::max(1.0, std::abs(up[static_cast<std::size_t>(k)]));
}

bool VolumeLadder::attainable(int k, double cumulative) const noexcept {
    if (k < 0 || k > n_dates()) return false;
    const auto i = static_cast<std::size_t>(k);
    const double tol = tolerance(k);
    return cumulative >= down[i] - tol && cumulative <= up[i] + tol;
}

std::vector<double> VolumeLadder::integer_levels(int k) const {
    if (!discrete) throw DomainError("integer_levels requires a discrete ladder");
    const auto i = static_cast<std::size_t>(k);
    std::vector<double> out;
    for (double v = std::ceil(down[i] - tolerance(k)); v <= up[i] + tolerance(k); v += 1.0) {
        out.push_back(v);
    }
    return out;
}

VolumeLadder build_ladder(const SwingContract& contract, bool discrete) {
    contract.validate();
    if (discrete &&
        !(is_whole(contract.local_min) && is_whole(contract.local_max) &&
          is_whole(contract.global_min) && is_whole(contract.global_max))) {
        throw ConfigError("discrete ladder requires whole-number volume bounds");
    }
    const int n = contract.n_dates;
    VolumeLadder ladder;
    ladder.discrete = discrete;
    ladder.down.assign(static_cast<std::size_t>(n) + 1, 0.0);
    ladder.up.assign(static_cast<std::size_t>(n) + 1, 0.0);
    // Both bounds also account for q_min; with q_min = 0 this is
    // max(0, Q_min - (n-k) q_max) and min(k q_max, Q_max).
    for (int k = 1; k <= n; ++k) {
        const double before = k;
        const double after = n - k;
        ladder.down[static_cast<std::size_t>(k)] =
            std::max(before * contract.local_min, contract.global_min - after * contract.local_max);
        ladder.up[static_cast<std::size_t>(k)] =
            std::min(before * contract.local_max, contract.global_max - after * contract.local_min);
    }
    return ladder;
}

AdmissibleInterval admissible_interval(const SwingContract& contract, const VolumeLadder& ladder,
                                       int k, double cumulative) {
    if (k < 0 || k >= ladder.n_dates()) {
        std::ostringstream msg;
        msg << "date index " << k << " outside [0, " << ladder.n_dates() - 1 << "]";
        throw DomainError(msg.str());
    }
    if (!ladder.attainable(k, cumulative)) {
        std::ostringstream msg;
        msg << "cumulative volume " << cumulative << " not attainable at date " << k << " (T_k = ["
            << ladder.down[static_cast<std::size_t>(k)] << ", " << ladder.up[static_cast<std::size_t>(k)]
            << "])";
        throw DomainError(msg.str());
    }
    const auto next = static_cast<std::size_t>(k) + 1;
    AdmissibleInterval out{std::max(contract.local_min, ladder.down[next] - cumulative),
                           std::min(contract.local_max, ladder.up[next] - cumulative)};
    // Q within tolerance of T_k may push the endpoints past each other by a
    // rounding error; collapse onto the binding side.
    if (out.lo > out.hi) out.lo = out.hi = std::clamp(out.lo, contract.local_min, contract.local_max);
    return out;
}

std::vector<double> bang_bang_candidates(const AdmissibleInterval& interval) {
    if (interval.degenerate()) return {interval.lo};
    return {interval.lo, interval.hi};
}

double hausdorff_distance(const AdmissibleInterval& a, const AdmissibleInterval& b) noexcept {
    return std::max(std::abs(a.lo - b.lo), std::abs(a.hi - b.hi));
}

}  // namespace swing
