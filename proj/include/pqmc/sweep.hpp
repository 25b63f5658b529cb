#pragma once
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pqmc/config.hpp"
#include "pqmc/dmc.hpp"
#include "pqmc/fit.hpp"
#include "pqmc/gfmc.hpp"
#include "pqmc/guiding1d.hpp"
#include "pqmc/gwf_spin.hpp"
#include "pqmc/potential.hpp"
#include "pqmc/spin_model.hpp"

namespace pqmc {

// ---------------------------------------------------------------- continuum

struct DmcExperimentPoint {
    PotentialSpec pot;
    GuidingWF1D::Mode gwf_mode = GuidingWF1D::Mode::None;
    double beta = -1.0;       // Boltzmann mode; < 0 means optimize variationally
    double tau = 0.02;
    std::size_t nw = 2000;
    double p = 0.25;
    double xth_factor = 0.5;  // threshold = factor * right minimum
    int reps = 50;
    double max_time = 1e6;
};

struct DmcPointResult {
    // row fields, in CSV order
    double g = 0.0, x0 = 0.0;
    std::string gwf;
    double tau = 0.0;
    std::size_t nw = 0;
    double p = 0.0;
    double xth = 0.0;
    int reps = 0;
    double xi_mean = 0.0, xi_stderr = 0.0;
    int censored = 0;
    // bookkeeping (not serialized in the row schema)
    double gap = 0.0;
    double beta = 0.0;
    int aborted = 0;
    std::vector<double> times;  // crossed repetitions, in repetition order

    bool usable() const;  // >= 2 crossings and >= 95 % of repetitions crossed
};

DmcPointResult run_dmc_point(const DmcExperimentPoint& pt, std::uint64_t master_seed,
                             std::uint64_t point_index, int threads);

std::vector<DmcPointResult> run_dmc_sweep(const std::vector<DmcExperimentPoint>& points,
                                          std::uint64_t master_seed, int threads,
                                          std::ostream* log = nullptr);

void write_dmc_csv(const std::string& path, const std::vector<DmcPointResult>& rows);
std::vector<DmcPointResult> read_dmc_csv(const std::string& path);

// -------------------------------------------------------------------- spin

struct GfmcExperimentPoint {
    SpinModel model;
    SpinGuiding::Mode gwf_mode = SpinGuiding::Mode::None;
    double beta = -1.0;           // Boltzmann; < 0 means optimize
    Urbm urbm{};                  // uRBM couplings; n == 0 means optimize
    double tau = -1.0;            // <= 0 means suggested_time_step(model)
    std::size_t nw = 2000;
    double p = 0.10;
    int reps = 200;
    double max_time = 1e6;
    int hidden_sweeps = 5;
};

struct GfmcPointResult {
    std::string model;  // "chain" or "shamrock"
    int n = 0, leaves = 0;
    double j = 0.0, gamma = 0.0, epsilon = 0.0;
    std::string gwf;
    double tau = 0.0;
    std::size_t nw = 0;
    double p = 0.0;
    int reps = 0;
    double xi_mean = 0.0, xi_stderr = 0.0;
    int censored = 0;
    // bookkeeping
    double gap = 0.0;
    double beta = 0.0;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
    int aborted = 0;
    std::vector<double> times;

    bool usable() const;
};

// Gap from the matching oracle: free fermions for the chain, exact
// diagonalization for the shamrock.
double spin_gap_oracle(const SpinModel& model);

GfmcPointResult run_gfmc_point(const GfmcExperimentPoint& pt, std::uint64_t master_seed,
                               std::uint64_t point_index, int threads);

std::vector<GfmcPointResult> run_gfmc_sweep(const std::vector<GfmcExperimentPoint>& points,
                                            std::uint64_t master_seed, int threads,
                                            std::ostream* log = nullptr);

void write_gfmc_csv(const std::string& path, const std::vector<GfmcPointResult>& rows);
std::vector<GfmcPointResult> read_gfmc_csv(const std::string& path);

// ------------------------------------------------------------------ report

struct ReportOptions {
    std::optional<double> reference_alpha;
    std::optional<double> reference_b;
    std::optional<double> b_min;  // acceptance band; violation flips the status
    std::optional<double> b_max;
    bool pimc_reference = false;  // add the 2^K / gap^2 curve (shamrock)
};

struct ReportOutcome {
    bool ok = true;
    std::optional<PowerLawFit> fit;
    double bootstrap_b_err = 0.0;
};

template <class Row>
std::vector<ScalingPoint> scaling_points(const std::vector<Row>& rows) {
    std::vector<ScalingPoint> out;
    for (const auto& r : rows)
        if (r.usable()) out.push_back({r.gap, r.xi_mean, r.xi_stderr});
    return out;
}

ReportOutcome emit_dmc_report(const std::string& path,
                              const std::vector<DmcPointResult>& rows, int fit_window,
                              const ReportOptions& opts);
ReportOutcome emit_gfmc_report(const std::string& path,
                               const std::vector<GfmcPointResult>& rows, int fit_window,
                               const ReportOptions& opts);

// --------------------------------------------------------------- experiment

// Runs the experiment described by a flat key = value configuration
// (subcommand flags funnel into the same path). Returns a process exit code.
int run_experiment(const KeyValueConfig& cfg, std::ostream& log);

} // namespace pqmc
