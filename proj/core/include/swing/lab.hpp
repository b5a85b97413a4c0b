#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "swing/basis.hpp"
#include "swing/contract.hpp"
#include "swing/market.hpp"
#include "swing/mlp.hpp"

namespace swing {

/// Least-squares fit of log(error) = intercept + slope * log(abscissa).
struct RateFit {
    std::string label;
    std::vector<double> abscissae;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;         ///< RMS residual of the log-log fit
    double slope_halfwidth = 0.0;  ///< 95% normal-approximation half-width
};

/// Needs at least two points with strictly increasing positive abscissae and
/// positive errors.
RateFit fit_loglog(std::string label, std::vector<double> abscissae, std::vector<double> errors);

struct TailCurve {
    double delta = 0.0;
    std::vector<double> sample_sizes;
    std::vector<double> frequencies;
    std::size_t replications = 0;
};

struct Verdict {
    std::string criterion;
    bool passed = false;
    bool inconclusive = false;
    std::string detail;
};

/// Outcome of one experiment: raw data table, fits and verdicts.
struct ConvergenceReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> settings;
    std::vector<RateFit> fits;
    std::vector<TailCurve> tails;
    std::vector<Verdict> verdicts;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> notes;

    [[nodiscard]] bool passed() const noexcept;
};

/// Raw data as comma-separated text with a header row.
void write_report_data(std::ostream& out, const ConvergenceReport& report);
/// Human-readable verdict summary.
void write_report_summary(std::ostream& out, const ConvergenceReport& report);

/// Finite-chain experiment fixture.
struct FiniteSetup {
    SwingContract contract;
    FiniteStateModel model;
    bool discrete = true;
    int grid_density = 51;
};

/// Exact error of the projected recursion V^m against V over nested bases.
/// Errors are sup over levels of the L2(marginal of X_k) distance, per date.
ConvergenceReport sweep_basis_size(const FiniteSetup& setup, BasisKind kind, const std::vector<std::size_t>& sizes);

struct McSweepOptions {
    BasisSpec basis;
    std::vector<std::size_t> sample_sizes;
    std::size_t replications = 200;
    double norm_order = 2.0;
    double slope_lo = -0.65;
    double slope_hi = -0.35;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// L^s error of V^{m,N}_0 against V^m_0 versus N with a log-log rate fit.
ConvergenceReport sweep_mc_size(const FiniteSetup& setup, const McSweepOptions& options);

enum class SampleLaw { normal, exponential, constant, pareto };
std::string to_string(SampleLaw law);
SampleLaw sample_law_from_string(const std::string& name);

struct MzOptions {
    SampleLaw law = SampleLaw::normal;
    double parameter = 1.0;  ///< constant value, or Pareto tail index
    double order = 2.0;
    std::vector<std::size_t> sample_sizes;
    std::size_t replications = 2000;
    double expected_slope = -0.5;
    double slope_tolerance = 0.03;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// L^p norm of the centered sample mean versus N.
ConvergenceReport mz_rate_check(const MzOptions& options);

struct TailOptions {
    BasisSpec basis;
    std::vector<std::size_t> sample_sizes;
    std::size_t replications = 500;
    double norm_order = 2.0;
    /// Exceedance threshold; <= 0 calibrates it from pilot replications at
    /// the smallest N so the exceedance frequency there is `target_frequency`.
    double delta = 0.0;
    double target_frequency = 0.8;
    double slope_slack = 0.35;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// Frequency of max_{k,Q} |theta_{k,m,N}(Q) - theta_{k,m}(Q)| >= delta versus N.
ConvergenceReport deviation_tail_check(const FiniteSetup& setup, const TailOptions& options);

/// Maximum adjacent-level difference of exact continuous-mode tables under
/// grid refinement, plus endpoint agreement with the discrete-mode table.
ConvergenceReport continuity_scan(const FiniteSetup& setup, const std::vector<int>& densities);

struct NnSweepOptions {
    std::vector<std::size_t> widths;
    std::size_t depth = 2;
    Activation activation = Activation::sigmoid;
    TrainConfig training;
    std::size_t n_paths = 20000;
    double loss_tolerance = 1e-4;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// Neural backward sweeps across widths against the exact price, and
/// best-of-restarts losses across widths on fixed exact targets.
ConvergenceReport nn_width_sweep(const FiniteSetup& setup, const NnSweepOptions& options);

}  // namespace swing
