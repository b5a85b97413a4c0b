#include "swing/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "swing/error.hpp"
#include "swing/grid.hpp"
#include "swing/lsmc.hpp"
#include "swing/neural.hpp"
#include "swing/oracle.hpp"
#include "swing/parallel.hpp"
#include "swing/rng.hpp"

namespace swing {
namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Prepared {
    VolumeLadder ladder;
    QGrid grid;
};

Prepared prepare(const FiniteSetup& setup, bool discrete) {
    setup.model.validate();
    Prepared p{build_ladder(setup.contract, discrete), {}};
    p.grid = make_grid(setup.contract, p.ladder, setup.grid_density);
    return p;
}

void add_setup_settings(ConvergenceReport& report, const FiniteSetup& setup) {
    const auto& c = setup.contract;
    report.settings.emplace_back("n_dates", std::to_string(c.n_dates));
    report.settings.emplace_back("strike", fmt_exact(c.strike));
    report.settings.emplace_back("q_min", fmt_exact(c.local_min));
    report.settings.emplace_back("q_max", fmt_exact(c.local_max));
    report.settings.emplace_back("Q_min", fmt_exact(c.global_min));
    report.settings.emplace_back("Q_max", fmt_exact(c.global_max));
    report.settings.emplace_back("states", std::to_string(setup.model.size()));
    report.settings.emplace_back("discrete", setup.discrete ? "true" : "false");
}

}  // namespace

RateFit fit_loglog(std::string label, std::vector<double> abscissae, std::vector<double> errors) {
    if (abscissae.size() != errors.size() || abscissae.size() < 2) {
        throw DomainError("rate fit needs at least two (abscissa, error) pairs");
    }
    for (std::size_t i = 0; i < abscissae.size(); ++i) {
        if (!(abscissae[i] > 0.0) || !(errors[i] > 0.0)) throw DomainError("rate fit needs positive values");
        if (i > 0 && !(abscissae[i] > abscissae[i - 1])) throw DomainError("abscissae must be strictly increasing");
    }
    const auto n = static_cast<double>(abscissae.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < abscissae.size(); ++i) {
        mx += std::log(abscissae[i]);
        my += std::log(errors[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < abscissae.size(); ++i) {
        const double dx = std::log(abscissae[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(errors[i]) - my);
    }
    RateFit fit;
    fit.label = std::move(label);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < abscissae.size(); ++i) {
        const double r = std::log(errors[i]) - (fit.intercept + fit.slope * std::log(abscissae[i]));
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    fit.slope_halfwidth = abscissae.size() > 2 ? 1.96 * std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
    fit.abscissae = std::move(abscissae);
    fit.errors = std::move(errors);
    return fit;
}

bool ConvergenceReport::passed() const noexcept {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

void write_report_data(std::ostream& out, const ConvergenceReport& report) {
    for (std::size_t i = 0; i < report.columns.size(); ++i) out << (i ? "," : "") << report.columns[i];
    out << '\n';
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt_exact(row[i]);
        out << '\n';
    }
}

void write_report_summary(std::ostream& out, const ConvergenceReport& report) {
    out << "experiment: " << report.experiment << '\n';
    for (const auto& [k, v] : report.settings) out << "  " << k << " = " << v << '\n';
    for (const auto& fit : report.fits) {
        out << "fit " << fit.label << ": slope " << fmt(fit.slope) << " +/- " << fmt(fit.slope_halfwidth)
            << ", intercept " << fmt(fit.intercept) << ", rms residual " << fmt(fit.residual) << '\n';
        for (std::size_t i = 0; i < fit.abscissae.size(); ++i) {
            out << "    " << fmt(fit.abscissae[i]) << "  " << fmt(fit.errors[i]) << '\n';
        }
    }
    for (const auto& tail : report.tails) {
        out << "tail curve: delta " << fmt(tail.delta) << ", R = " << tail.replications << '\n';
        for (std::size_t i = 0; i < tail.sample_sizes.size(); ++i) {
            out << "    N = " << fmt(tail.sample_sizes[i]) << "  frequency " << fmt(tail.frequencies[i]) << '\n';
        }
    }
    for (const auto& note : report.notes) out << "note: " << note << '\n';
    for (const auto& v : report.verdicts) {
        out << (v.passed ? "PASS " : (v.inconclusive ? "INCONCLUSIVE " : "FAIL ")) << v.criterion << ": " << v.detail
            << '\n';
    }
    out << "overall: " << (report.passed() ? "PASS" : "FAIL") << '\n';
}

ConvergenceReport sweep_basis_size(const FiniteSetup& setup, BasisKind kind, const std::vector<std::size_t>& sizes) {
    if (kind == BasisKind::indicator_partition) {
        throw ConfigError("sweep_basis_size needs a nested family (normalized_hermite or monomial)");
    }
    if (sizes.empty()) throw ConfigError("sweep_basis_size needs at least one basis size");
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        if (sizes[i] <= sizes[i - 1]) throw ConfigError("basis sizes must be strictly increasing (nested family)");
    }
    const Prepared prep = prepare(setup, setup.discrete);
    const SwingContract& contract = setup.contract;
    const int n = contract.n_dates;
    const ExactValueTable exact =
        solve_exact(contract, prep.ladder, setup.model, prep.grid, default_search(prep.grid));

    ConvergenceReport report;
    report.experiment = "sweep-m";
    add_setup_settings(report, setup);
    report.settings.emplace_back("basis", to_string(kind));
    report.columns = {"m", "date", "error"};

    std::vector<std::vector<double>> errors(sizes.size(), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (std::size_t a = 0; a < sizes.size(); ++a) {
        const TheoreticalSolution sol =
            theoretical_sweep(contract, prep.ladder, setup.model, BasisSpec{kind, sizes[a], {}}, prep.grid);
        for (int k = 0; k < n; ++k) {
            const std::vector<double> law = setup.model.marginal(k);
            double worst = 0.0;
            for (std::size_t l = 0; l < prep.grid.at(k).size(); ++l) {
                double acc = 0.0;
                for (std::size_t j = 0; j < setup.model.size(); ++j) {
                    const double d = sol.value(k, j, l) - exact.value(k, j, l);
                    acc += law[j] * d * d;
                }
                worst = std::max(worst, std::sqrt(acc));
            }
            errors[a][static_cast<std::size_t>(k)] = worst;
            report.rows.push_back({static_cast<double>(sizes[a]), static_cast<double>(k), worst});
        }
    }

    bool monotone = true;
    std::ostringstream where;
    for (std::size_t a = 1; a < sizes.size(); ++a) {
        for (int k = 0; k < n; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            if (errors[a][kk] > errors[a - 1][kk] + 1e-12) {
                monotone = false;
                where << " date " << k << ": m=" << sizes[a - 1] << " -> " << fmt(errors[a - 1][kk]) << ", m="
                      << sizes[a] << " -> " << fmt(errors[a][kk]) << ";";
            }
        }
    }
    report.verdicts.push_back({"basis_size_monotone", monotone, false,
                               monotone ? "sup_Q ||V^m_k - V_k||_2 non-increasing in m at every date"
                                        : "increase found:" + where.str()});

    if (sizes.back() >= setup.model.size()) {
        const double last = *std::max_element(errors.back().begin(), errors.back().end());
        report.verdicts.push_back({"complete_basis_exact", last <= 1e-10, false,
                                   "max over dates at m = " + std::to_string(sizes.back()) + ": " + fmt(last) +
                                       " (tolerance 1e-10)"});
    }

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t a = 0; a < sizes.size(); ++a) {
        if (errors[a][0] > 1e-14) {
            xs.push_back(static_cast<double>(sizes[a]));
            ys.push_back(errors[a][0]);
        }
    }
    if (xs.size() >= 2) report.fits.push_back(fit_loglog("date0_error_vs_m", xs, ys));
    return report;
}

ConvergenceReport sweep_mc_size(const FiniteSetup& setup, const McSweepOptions& options) {
    if (options.sample_sizes.size() < 4) throw ConfigError("sweep_mc_size needs at least 4 sample sizes");
    if (options.replications < 1) throw ConfigError("sweep_mc_size needs replications >= 1");
    if (!(options.norm_order >= 1.0)) throw ConfigError("norm order s must be >= 1");
    options.basis.validate();
    const Prepared prep = prepare(setup, setup.discrete);
    const SwingContract& contract = setup.contract;
    const TheoreticalSolution theo = theoretical_sweep(contract, prep.ladder, setup.model, options.basis, prep.grid);
    const std::vector<double> law = setup.model.marginal(0);
    const std::size_t levels = prep.grid.at(0).size();
    const double s = options.norm_order;

    ConvergenceReport report;
    report.experiment = "sweep-n";
    add_setup_settings(report, setup);
    report.settings.emplace_back("basis", to_string(options.basis.kind) + "/" + std::to_string(options.basis.size));
    report.settings.emplace_back("replications", std::to_string(options.replications));
    report.settings.emplace_back("s", fmt_exact(s));
    report.columns = {"N", "replication", "error"};

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t a = 0; a < options.sample_sizes.size(); ++a) {
        const std::size_t n_paths = options.sample_sizes[a];
        std::vector<double> stats(options.replications, 0.0);
        parallel_for(options.replications, options.threads, [&](std::size_t r) {
            const std::uint64_t seed = derive_seed(options.seed, (static_cast<std::uint64_t>(a) << 32) | r);
            const PathSet paths = simulate_paths(setup.model, contract.n_dates, n_paths, seed);
            BackwardOptions bo;
            bo.realized_std_error = false;
            const BackwardResult fit = backward_sweep(contract, prep.ladder, paths, options.basis, prep.grid, bo);
            const std::vector<double> table = state_value_table(contract, prep.ladder, setup.model, fit.model, 0);
            double acc = 0.0;
            for (std::size_t j = 0; j < setup.model.size(); ++j) {
                double worst = 0.0;
                for (std::size_t l = 0; l < levels; ++l) {
                    worst = std::max(worst, std::abs(table[j * levels + l] - theo.value(0, j, l)));
                }
                acc += law[j] * std::pow(worst, s);
            }
            stats[r] = acc;
        });
        double mean = 0.0;
        for (std::size_t r = 0; r < stats.size(); ++r) {
            mean += stats[r];
            report.rows.push_back({static_cast<double>(n_paths), static_cast<double>(r), std::pow(stats[r], 1.0 / s)});
        }
        mean /= static_cast<double>(stats.size());
        xs.push_back(static_cast<double>(n_paths));
        ys.push_back(std::pow(mean, 1.0 / s));
    }
    const RateFit fit = fit_loglog("Ls_error_vs_N", xs, ys);
    report.fits.push_back(fit);
    const bool in_band = fit.slope >= options.slope_lo && fit.slope <= options.slope_hi;
    report.verdicts.push_back({"mc_rate_slope", in_band, false,
                               "slope " + fmt(fit.slope) + " in [" + fmt(options.slope_lo) + ", " +
                                   fmt(options.slope_hi) + "]"});
    const double predicted = std::exp(fit.intercept) * std::pow(xs.back(), fit.slope);
    report.verdicts.push_back({"mc_rate_extrapolation", ys.back() <= 2.0 * predicted, false,
                               "error at N = " + fmt(xs.back()) + ": " + fmt(ys.back()) + " <= 2 x fitted " +
                                   fmt(predicted)});
    return report;
}

std::string to_string(SampleLaw law) {
    switch (law) {
        case SampleLaw::normal: return "normal";
        case SampleLaw::exponential: return "exponential";
        case SampleLaw::constant: return "constant";
        case SampleLaw::pareto: return "pareto";
    }
    return "unknown";
}

SampleLaw sample_law_from_string(const std::string& name) {
    if (name == "normal") return SampleLaw::normal;
    if (name == "exponential") return SampleLaw::exponential;
    if (name == "constant") return SampleLaw::constant;
    if (name == "pareto") return SampleLaw::pareto;
    throw ConfigError("unknown distribution '" + name + "'");
}

ConvergenceReport mz_rate_check(const MzOptions& options) {
    const double p = options.order;
    if (!(p >= 2.0)) throw ConfigError("Marcinkiewicz-Zygmund check needs order p >= 2");
    if (options.sample_sizes.size() < 4) throw ConfigError("mz_rate_check needs at least 4 sample sizes");
    double mean = 0.0;
    double abs_moment = 0.0;  // E|X|^p
    switch (options.law) {
        case SampleLaw::normal:
            mean = 0.0;
            abs_moment = std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
            break;
        case SampleLaw::exponential:
            mean = 1.0;
            abs_moment = std::tgamma(p + 1.0);
            break;
        case SampleLaw::constant:
            mean = options.parameter;
            abs_moment = std::pow(std::abs(options.parameter), p);
            break;
        case SampleLaw::pareto: {
            const double alpha = options.parameter;
            if (!(alpha > p)) {
                throw ConfigError("Pareto tail index " + fmt(alpha) + " has no finite moment of order " + fmt(p));
            }
            mean = alpha / (alpha - 1.0);
            abs_moment = alpha / (alpha - p);
            break;
        }
    }

    ConvergenceReport report;
    report.experiment = "mz-check";
    report.settings.emplace_back("law", to_string(options.law));
    report.settings.emplace_back("p", fmt_exact(p));
    report.settings.emplace_back("replications", std::to_string(options.replications));
    report.columns = {"N", "Lp_error", "scaled_error"};

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t a = 0; a < options.sample_sizes.size(); ++a) {
        const std::size_t n = options.sample_sizes[a];
        std::vector<double> dev(options.replications, 0.0);
        parallel_for(options.replications, options.threads, [&](std::size_t r) {
            CounterRng rng(options.seed, a, r);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double x = 0.0;
                switch (options.law) {
                    case SampleLaw::normal: x = rng.normal(); break;
                    case SampleLaw::exponential: x = rng.exponential(); break;
                    case SampleLaw::constant: x = options.parameter; break;
                    case SampleLaw::pareto: x = std::pow(rng.uniform(), -1.0 / options.parameter); break;
                }
                acc += x;
            }
            dev[r] = std::pow(std::abs(acc / static_cast<double>(n) - mean), p);
        });
        double acc = 0.0;
        for (double d : dev) acc += d;
        const double norm = std::pow(acc / static_cast<double>(dev.size()), 1.0 / p);
        report.rows.push_back({static_cast<double>(n), norm, norm * std::sqrt(static_cast<double>(n))});
        xs.push_back(static_cast<double>(n));
        ys.push_back(norm);
    }

    if (std::all_of(ys.begin(), ys.end(), [](double v) { return v == 0.0; })) {
        report.verdicts.push_back({"mz_rate_slope", true, false, "zero variance: error 0 at every N"});
        return report;
    }
    const RateFit fit = fit_loglog("Lp_error_vs_N", xs, ys);
    report.fits.push_back(fit);
    const double plateau = ys.back() * std::sqrt(xs.back());
    const double moment_term = std::pow(2.0, (p - 1.0) / p) * std::pow(abs_moment + std::pow(std::abs(mean), p), 1.0 / p);
    report.notes.push_back("plateau ||mean - mu||_p sqrt(N) at largest N: " + fmt(plateau));
    report.notes.push_back("fitted constant exp(intercept): " + fmt(std::exp(fit.intercept)) +
                           "; moment factor 2^((p-1)/p) (E|X|^p + |mu|^p)^(1/p): " + fmt(moment_term) +
                           "; implied B_p: " + fmt(plateau / moment_term));
    const bool ok = std::abs(fit.slope - options.expected_slope) <= options.slope_tolerance;
    report.verdicts.push_back({"mz_rate_slope", ok, false,
                               "slope " + fmt(fit.slope) + " within " + fmt(options.slope_tolerance) + " of " +
                                   fmt(options.expected_slope)});
    return report;
}

namespace {

double max_coefficient_gap(const ContinuationModel& model, const TheoreticalSolution& theo) {
    double worst = 0.0;
    for (std::size_t k = 0; k < model.coefficients.size(); ++k) {
        for (std::size_t l = 0; l < model.coefficients[k].size(); ++l) {
            if (!model.fitted[k][l] || !theo.fitted[k][l]) continue;
            worst = std::max(worst, (model.coefficients[k][l] - theo.coefficients[k][l]).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

}  // namespace

ConvergenceReport deviation_tail_check(const FiniteSetup& setup, const TailOptions& options) {
    if (options.sample_sizes.size() < 2) throw ConfigError("deviation_tail_check needs at least 2 sample sizes");
    if (options.replications < 1) throw ConfigError("deviation_tail_check needs replications >= 1");
    options.basis.validate();
    const Prepared prep = prepare(setup, setup.discrete);
    const SwingContract& contract = setup.contract;
    const TheoreticalSolution theo = theoretical_sweep(contract, prep.ladder, setup.model, options.basis, prep.grid);
    const std::size_t reps = options.replications;

    auto deviations = [&](std::size_t n_paths, std::uint64_t namespace_tag) {
        std::vector<double> dev(reps, 0.0);
        parallel_for(reps, options.threads, [&](std::size_t r) {
            const std::uint64_t seed = derive_seed(derive_seed(options.seed, namespace_tag), (n_paths << 20) ^ r);
            const PathSet paths = simulate_paths(setup.model, contract.n_dates, n_paths, seed);
            BackwardOptions bo;
            bo.realized_std_error = false;
            const BackwardResult fit = backward_sweep(contract, prep.ladder, paths, options.basis, prep.grid, bo);
            dev[r] = max_coefficient_gap(fit.model, theo);
        });
        return dev;
    };

    ConvergenceReport report;
    report.experiment = "tails";
    add_setup_settings(report, setup);
    report.settings.emplace_back("basis", to_string(options.basis.kind) + "/" + std::to_string(options.basis.size));
    report.settings.emplace_back("replications", std::to_string(reps));
    report.settings.emplace_back("s", fmt_exact(options.norm_order));
    report.columns = {"N", "replication", "deviation", "delta"};

    double delta = options.delta;
    if (!(delta > 0.0)) {
        // Pilot replications on their own seed namespace.
        std::vector<double> pilot = deviations(options.sample_sizes.front(), 0x70696c6f74ULL);
        std::sort(pilot.begin(), pilot.end());
        const double q = std::clamp(1.0 - options.target_frequency, 0.0, 1.0);
        const auto idx = std::min(pilot.size() - 1, static_cast<std::size_t>(q * static_cast<double>(pilot.size())));
        delta = pilot[idx];
        report.notes.push_back("delta calibrated from " + std::to_string(pilot.size()) +
                               " pilot replications at the smallest N (target frequency " +
                               fmt(options.target_frequency) + "): " + fmt(delta));
    }
    report.settings.emplace_back("delta", fmt_exact(delta));

    TailCurve tail;
    tail.delta = delta;
    tail.replications = reps;
    for (std::size_t n_paths : options.sample_sizes) {
        const std::vector<double> dev = deviations(n_paths, 0x6d61696eULL);
        std::size_t hits = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            if (dev[r] >= delta) ++hits;
            report.rows.push_back({static_cast<double>(n_paths), static_cast<double>(r), dev[r], delta});
        }
        tail.sample_sizes.push_back(static_cast<double>(n_paths));
        tail.frequencies.push_back(static_cast<double>(hits) / static_cast<double>(reps));
    }
    report.tails.push_back(tail);

    const auto& f = tail.frequencies;
    const bool degenerate = std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; }) ||
                            std::all_of(f.begin(), f.end(), [](double v) { return v == 1.0; });
    if (degenerate) {
        report.verdicts.push_back({"tails_informative", false, true,
                                   "all frequencies are 0 or 1; choose delta so the smallest-N frequency lies in "
                                   "[0.05, 0.8]"});
        return report;
    }
    if (f.front() < 0.05 || f.front() > 0.8) {
        report.notes.push_back("smallest-N frequency " + fmt(f.front()) +
                               " outside [0.05, 0.8]; consider recalibrating delta");
    }

    bool monotone = true;
    for (std::size_t i = 1; i < f.size(); ++i) monotone = monotone && f[i] <= f[i - 1];
    report.verdicts.push_back({"tails_monotone", monotone, false, "exceedance frequencies non-increasing in N"});

    const double floor = 5.0 / static_cast<double>(reps);
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] >= floor) {
            xs.push_back(tail.sample_sizes[i]);
            ys.push_back(f[i]);
        }
    }
    const double limit = -options.norm_order / 2.0 + options.slope_slack;
    if (xs.size() < 2) {
        report.verdicts.push_back({"tails_slope", false, true,
                                   "fewer than two frequencies above 5/R; increase R or lower delta"});
    } else {
        const RateFit fit = fit_loglog("exceedance_vs_N", xs, ys);
        report.fits.push_back(fit);
        report.verdicts.push_back({"tails_slope", fit.slope <= limit, false,
                                   "informative-segment slope " + fmt(fit.slope) + " <= " + fmt(limit)});
    }
    return report;
}

ConvergenceReport continuity_scan(const FiniteSetup& setup, const std::vector<int>& densities) {
    if (densities.size() < 2) throw ConfigError("continuity_scan needs at least two grid densities");
    for (std::size_t i = 1; i < densities.size(); ++i) {
        if (densities[i] <= densities[i - 1]) throw ConfigError("grid densities must be increasing");
    }
    setup.model.validate();
    const SwingContract& contract = setup.contract;
    const VolumeLadder ladder = build_ladder(contract, false);
    const int n = contract.n_dates;

    ConvergenceReport report;
    report.experiment = "continuity";
    add_setup_settings(report, setup);
    report.columns = {"density", "date", "state", "Q", "value"};

    std::vector<double> gaps;
    std::vector<ExactValueTable> tables;
    for (int density : densities) {
        const QGrid grid = make_grid(contract, ladder, density);
        ExactValueTable table = solve_exact(contract, ladder, setup.model, grid);
        double gap = 0.0;
        for (int k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < setup.model.size(); ++j) {
                const auto profile = continuity_profile(table, k, j);
                for (std::size_t l = 0; l < profile.size(); ++l) {
                    report.rows.push_back({static_cast<double>(density), static_cast<double>(k), static_cast<double>(j),
                                           profile[l].first, profile[l].second});
                    if (l > 0) gap = std::max(gap, std::abs(profile[l].second - profile[l - 1].second));
                }
            }
        }
        gaps.push_back(gap);
        tables.push_back(std::move(table));
    }

    std::ostringstream detail;
    bool refines = true;
    for (std::size_t i = 1; i < densities.size(); ++i) {
        const double doublings =
            std::log2(static_cast<double>(densities[i] - 1) / static_cast<double>(densities[i - 1] - 1));
        const double allowed = gaps[i - 1] / std::pow(1.2, doublings);
        detail << "G=" << densities[i] << ": " << fmt(gaps[i]) << " <= " << fmt(allowed) << "; ";
        refines = refines && gaps[i] <= allowed;
    }
    report.verdicts.push_back({"continuity_refinement", refines, false, detail.str()});
    report.verdicts.push_back({"continuity_overall", gaps.back() <= 0.6 * gaps.front(), false,
                               "max adjacent difference " + fmt(gaps.back()) + " at G=" +
                                   std::to_string(densities.back()) + " <= 0.6 x " + fmt(gaps.front())});

    if (gaps.front() > 0.0 && std::all_of(gaps.begin(), gaps.end(), [](double g) { return g > 0.0; })) {
        std::vector<double> xs;
        for (int d : densities) xs.push_back(static_cast<double>(d - 1));
        const RateFit fit = fit_loglog("max_adjacent_difference_vs_intervals", xs, gaps);
        report.fits.push_back(fit);
        report.verdicts.push_back({"continuity_extrapolates_to_zero", fit.slope <= -0.5, false,
                                   "refinement slope " + fmt(fit.slope) + " <= -0.5"});
    }

    if (contract.bang_bang_setting()) {
        const VolumeLadder discrete_ladder = build_ladder(contract, true);
        const QGrid discrete_grid = make_grid(contract, discrete_ladder);
        const ExactValueTable discrete = solve_exact(contract, discrete_ladder, setup.model, discrete_grid);
        double worst = 0.0;
        for (const ExactValueTable& table : tables) {
            for (int k = 0; k < n; ++k) {
                const auto& levels = table.grid.at(k);
                const auto& dlevels = discrete_grid.at(k);
                for (std::size_t j = 0; j < setup.model.size(); ++j) {
                    worst = std::max(worst, std::abs(table.value(k, j, 0) - discrete.value(k, j, 0)));
                    worst = std::max(worst, std::abs(table.value(k, j, levels.size() - 1) -
                                                     discrete.value(k, j, dlevels.size() - 1)));
                }
            }
        }
        report.verdicts.push_back({"continuity_endpoints", worst <= 1e-10, false,
                                   "max endpoint gap to discrete-mode values " + fmt(worst) + " (tolerance 1e-10)"});
    }
    return report;
}

ConvergenceReport nn_width_sweep(const FiniteSetup& setup, const NnSweepOptions& options) {
    if (!setup.discrete) throw ConfigError("nn_width_sweep runs in the discrete bang-bang setting only");
    if (options.widths.empty()) throw ConfigError("nn_width_sweep needs widths");
    for (std::size_t i = 1; i < options.widths.size(); ++i) {
        if (options.widths[i] <= options.widths[i - 1]) throw ConfigError("widths must be strictly increasing");
    }
    const Prepared prep = prepare(setup, true);
    const SwingContract& contract = setup.contract;
    const int n = contract.n_dates;
    const ExactValueTable exact = solve_exact(contract, prep.ladder, setup.model, prep.grid);
    const PathSet paths = simulate_paths(setup.model, n, options.n_paths, options.seed, options.threads);
    const CandidatePlan plan = plan_candidates(contract, prep.ladder, prep.grid, default_search(prep.grid));

    ConvergenceReport report;
    report.experiment = "nn-sweep";
    add_setup_settings(report, setup);
    report.settings.emplace_back("n_paths", std::to_string(options.n_paths));
    report.settings.emplace_back("restarts", std::to_string(options.training.restarts));
    report.settings.emplace_back("activation", to_string(options.activation));
    report.settings.emplace_back("exact_price", fmt_exact(exact.price));
    report.columns = {"record", "width", "date", "level", "value", "aux"};

    // Date-0 price gap of the neural backward induction per width.
    double last_gap = 0.0;
    double last_tol = 0.0;
    for (std::size_t w : options.widths) {
        MlpSpec spec{1, options.depth, w, options.activation, 0.0};
        TrainConfig cfg = options.training;
        cfg.seed = derive_seed(options.training.seed, w);
        const NeuralSweepResult res = nn_backward_sweep(contract, prep.ladder, paths, spec, cfg, prep.grid, options.threads);
        const double gap = std::abs(res.in_sample.value - exact.price);
        last_gap = gap;
        last_tol = std::max(3.0 * res.in_sample.std_error, 0.01 * std::abs(exact.price));
        report.rows.push_back({0.0, static_cast<double>(w), 0.0, 0.0, res.in_sample.value, res.in_sample.std_error});
        report.notes.push_back("width " + std::to_string(w) + ": price " + fmt(res.in_sample.value) + " (se " +
                               fmt(res.in_sample.std_error) + "), gap " + fmt(gap));
    }
    report.verdicts.push_back({"nn_price_gap", last_gap <= last_tol, false,
                               "gap " + fmt(last_gap) + " at width " + std::to_string(options.widths.back()) +
                                   " <= max(3 se, 1%) = " + fmt(last_tol)});

    // Best-of-restarts losses per width on fixed exact targets. Each width also
    // restarts from the previous width's best network embedded with zero units.
    bool monotone = true;
    std::ostringstream where;
    std::vector<double> xs(options.n_paths);
    std::vector<double> ys(options.n_paths);
    for (int k = 0; k + 1 < n; ++k) {
        const std::vector<bool> reached = reached_levels(plan, prep.grid, k);
        for (std::size_t p = 0; p < options.n_paths; ++p) xs[p] = paths.x(p, k);
        for (std::size_t l = 0; l < reached.size(); ++l) {
            if (!reached[l]) continue;
            for (std::size_t p = 0; p < options.n_paths; ++p) {
                ys[p] = exact.value(k + 1, static_cast<std::size_t>(paths.state_index[paths.at(p, k + 1)]), l);
            }
            std::optional<MlpParams> carried;
            MlpSpec previous{};
            double previous_loss = INFINITY;
            for (std::size_t w : options.widths) {
                const MlpSpec spec{1, options.depth, w, options.activation, 0.0};
                TrainConfig cfg = options.training;
                cfg.seed = derive_seed(options.training.seed, (static_cast<std::uint64_t>(k) << 40) ^ (l << 20) ^ w);
                std::optional<MlpParams> warm;
                if (carried) warm = widen_params(previous, *carried, spec);
                const TrainResult tr = train_continuation(spec, cfg, xs, ys, warm);
                report.rows.push_back({1.0, static_cast<double>(w), static_cast<double>(k), static_cast<double>(l),
                                       tr.loss, tr.initial_loss});
                if (tr.loss > previous_loss + options.loss_tolerance) {
                    monotone = false;
                    where << " (k=" << k << ", l=" << l << ", width " << w << ")";
                }
                previous_loss = tr.loss;
                carried = tr.params;
                previous = spec;
            }
        }
    }
    report.verdicts.push_back({"nn_loss_monotone", monotone, false,
                               monotone ? "best-of-restarts losses non-increasing in width within " +
                                              fmt(options.loss_tolerance)
                                        : "increase at" + where.str()});
    return report;
}

}  // namespace swing
