#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "swing/contract.hpp"
#include "swing/market.hpp"
#include "swing/rng.hpp"

namespace swing::testing {

/// Five states on {-2..2}; P(i -> j) proportional to a Gaussian kernel around
/// 0.6 x_i; spot 20 exp(x / 4) around strike 20.
inline FiniteStateModel fixture5() {
    FiniteStateModel m;
    m.states = {-2.0, -1.0, 0.0, 1.0, 2.0};
    Eigen::MatrixXd p(5, 5);
    for (int i = 0; i < 5; ++i) {
        double row = 0.0;
        for (int j = 0; j < 5; ++j) {
            const double d = m.states[j] - 0.6 * m.states[i];
            p(i, j) = std::exp(-d * d / (2.0 * 0.64));
            row += p(i, j);
        }
        p.row(i) /= row;
    }
    m.transitions = {p};
    m.initial.assign(5, 0.2);
    std::vector<double> spot;
    for (double x : m.states) spot.push_back(20.0 * std::exp(0.25 * x));
    m.spot_values = {spot};
    return m;
}

inline SwingContract fixture5_contract() {
    SwingContract c;
    c.n_dates = 6;
    c.strike = 20.0;
    c.local_min = 0.0;
    c.local_max = 1.0;
    c.global_min = 2.0;
    c.global_max = 4.0;
    return c;
}

/// Random J-state chain with strictly positive transitions and per-date
/// spot rows (or one homogeneous row).
inline FiniteStateModel random_chain(std::size_t j, int n_dates, std::uint64_t seed, bool per_date_spots = true) {
    CounterRng rng(seed, 0xc4a1);
    FiniteStateModel m;
    for (std::size_t s = 0; s < j; ++s) m.states.push_back(static_cast<double>(s) - 0.5 * static_cast<double>(j - 1));
    Eigen::MatrixXd p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        for (Eigen::Index c = 0; c < p.cols(); ++c) p(r, c) = 0.05 + rng.uniform();
        p.row(r) /= p.row(r).sum();
    }
    m.transitions = {p};
    double total = 0.0;
    for (std::size_t s = 0; s < j; ++s) {
        m.initial.push_back(0.1 + rng.uniform());
        total += m.initial.back();
    }
    for (double& v : m.initial) v /= total;
    const int rows = per_date_spots ? n_dates : 1;
    for (int k = 0; k < rows; ++k) {
        std::vector<double> row;
        for (std::size_t s = 0; s < j; ++s) row.push_back(15.0 + 10.0 * rng.uniform());
        m.spot_values.push_back(row);
    }
    return m;
}

}  // namespace swing::testing
