#pragma once

#include <cstddef>
#include <vector>

namespace swing {

/// Swing contract with firm local and global volume constraints.
///
/// At each of the `n_dates` exercise dates the holder buys a volume q with
/// local_min <= q <= local_max at the fixed strike; the total purchased volume
/// must end in [global_min, global_max]. Volumes are in MWh, prices per MWh.
struct SwingContract {
    int n_dates = 1;
    double strike = 0.0;
    double local_min = 0.0;   ///< q_min
    double local_max = 1.0;   ///< q_max
    double global_min = 0.0;  ///< Q_min
    double global_max = 1.0;  ///< Q_max
    double discount = 1.0;    ///< per-step discount factor in (0, 1]

    /// Throws ConfigError on malformed bounds and FeasibilityError when no
    /// admissible plan exists.
    void validate() const;

    /// True when all four volume bounds are whole numbers and
    /// Q_max - Q_min is a multiple of q_max - q_min, i.e. optimal controls are
    /// attained at an endpoint of the admissible interval.
    [[nodiscard]] bool bang_bang_setting() const noexcept;

    friend bool operator==(const SwingContract&, const SwingContract&) = default;
};

/// Attainable cumulative consumption per date, T_k = [down[k], up[k]], k = 0..n.
struct VolumeLadder {
    std::vector<double> down;
    std::vector<double> up;
    bool discrete = false;

    [[nodiscard]] int n_dates() const noexcept { return static_cast<int>(down.size()) - 1; }

    /// Tolerance used when testing Q against T_k; absorbs float accumulation.
    [[nodiscard]] double tolerance(int k) const noexcept;

    [[nodiscard]] bool attainable(int k, double cumulative) const noexcept;

    /// Integer members of T_k (discrete ladders only).
    [[nodiscard]] std::vector<double> integer_levels(int k) const;
};

/// Closed interval of admissible next purchases.
struct AdmissibleInterval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool degenerate() const noexcept { return lo == hi; }

    friend bool operator==(const AdmissibleInterval&, const AdmissibleInterval&) = default;
};

VolumeLadder build_ladder(const SwingContract& contract, bool discrete);

/// Adm(t_k, Q): purchases at date k that keep a feasible completion.
/// Throws DomainError when k is out of range or (k, Q) is not attainable.
AdmissibleInterval admissible_interval(const SwingContract& contract, const VolumeLadder& ladder,
                                       int k, double cumulative);

/// Endpoints of the interval, ascending; one value when the interval is a point.
std::vector<double> bang_bang_candidates(const AdmissibleInterval& interval);

/// Hausdorff distance between two closed intervals.
double hausdorff_distance(const AdmissibleInterval& a, const AdmissibleInterval& b) noexcept;

}  // namespace swing
