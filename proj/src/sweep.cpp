#include "pqmc/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "pqmc/exact_diag.hpp"
#include "pqmc/free_fermion.hpp"
#include "pqmc/parallel.hpp"
#include "pqmc/spectral.hpp"
#include "pqmc/stats.hpp"

namespace pqmc {
namespace {

constexpr double kUsableCrossedFraction = 0.95;

std::string gwf_label_1d(GuidingWF1D::Mode m) {
    switch (m) {
        case GuidingWF1D::Mode::None: return "none";
        case GuidingWF1D::Mode::Boltzmann: return "boltzmann";
        case GuidingWF1D::Mode::Tabulated: return "tabulated";
    }
    return "?";
}

GuidingWF1D::Mode gwf_mode_1d(const std::string& s) {
    if (s == "none") return GuidingWF1D::Mode::None;
    if (s == "boltzmann") return GuidingWF1D::Mode::Boltzmann;
    if (s == "tabulated" || s == "exact") return GuidingWF1D::Mode::Tabulated;
    throw std::runtime_error("unknown continuum gwf '" + s + "'");
}

SpinGuiding::Mode spin_gwf_mode(const std::string& s) {
    if (s == "none") return SpinGuiding::Mode::None;
    if (s == "boltzmann") return SpinGuiding::Mode::Boltzmann;
    if (s == "urbm") return SpinGuiding::Mode::Urbm;
    if (s == "exact") return SpinGuiding::Mode::ExactTable;
    throw std::runtime_error("unknown spin gwf '" + s + "'");
}

void aggregate_times(const std::vector<double>& times, double& mean, double& err) {
    if (times.size() >= 2) {
        const RunStatistics st = summarize(times);
        mean = st.mean;
        err = st.stderr_of_mean;
    } else {
        mean = std::numeric_limits<double>::quiet_NaN();
        err = std::numeric_limits<double>::quiet_NaN();
    }
}

std::string csv_escape(const std::string& s) { return s; }  // labels are plain tokens

} // namespace

bool DmcPointResult::usable() const {
    return times.size() >= 2 &&
           static_cast<double>(times.size()) >= kUsableCrossedFraction * reps &&
           std::isfinite(xi_mean);
}

bool GfmcPointResult::usable() const {
    return times.size() >= 2 &&
           static_cast<double>(times.size()) >= kUsableCrossedFraction * reps &&
           std::isfinite(xi_mean);
}

DmcPointResult run_dmc_point(const DmcExperimentPoint& pt, std::uint64_t master_seed,
                             std::uint64_t point_index, int threads) {
    const SpectralResult sr = solve_lowest_two(pt.pot, default_spectral_grid(pt.pot));

    GuidingWF1D gwf;
    double beta = 0.0;
    switch (pt.gwf_mode) {
        case GuidingWF1D::Mode::None:
            gwf = GuidingWF1D::none();
            break;
        case GuidingWF1D::Mode::Boltzmann: {
            beta = pt.beta;
            if (beta <= 0.0) beta = optimize_boltzmann_beta(pt.pot, sr.grid).beta;
            gwf = GuidingWF1D::boltzmann(beta);
            break;
        }
        case GuidingWF1D::Mode::Tabulated:
            gwf = GuidingWF1D::tabulated(sr, pt.pot);
            break;
    }

    DmcConfig cfg;
    cfg.time_step = pt.tau;
    cfg.target_walkers = pt.nw;
    cfg.crossing_fraction = pt.p;
    cfg.threshold = pt.xth_factor * pt.pot.right_minimum();
    cfg.max_time = pt.max_time;

    std::vector<TunnelingSample> samples(pt.reps);
    parallel_for_index(pt.reps, threads, [&](std::size_t rep) {
        samples[rep] =
            measure_tunneling_time(cfg, gwf, pt.pot, derive_seed(master_seed, point_index, rep));
    });

    DmcPointResult row;
    row.g = pt.pot.g;
    row.x0 = pt.pot.x0;
    row.gwf = gwf_label_1d(pt.gwf_mode);
    row.tau = pt.tau;
    row.nw = pt.nw;
    row.p = pt.p;
    row.xth = cfg.threshold;
    row.reps = pt.reps;
    row.gap = sr.gap;
    row.beta = beta;
    for (const auto& s : samples) {
        switch (s.status) {
            case TunnelingSample::Status::Crossed: row.times.push_back(s.time); break;
            case TunnelingSample::Status::Censored: ++row.censored; break;
            default: ++row.aborted; break;
        }
    }
    aggregate_times(row.times, row.xi_mean, row.xi_stderr);
    return row;
}

std::vector<DmcPointResult> run_dmc_sweep(const std::vector<DmcExperimentPoint>& points,
                                          std::uint64_t master_seed, int threads,
                                          std::ostream* log) {
    std::vector<DmcPointResult> rows;
    rows.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        rows.push_back(run_dmc_point(points[i], master_seed, i, threads));
        if (log) {
            const auto& r = rows.back();
            *log << "dmc point g=" << r.g << " x0=" << r.x0 << " gwf=" << r.gwf
                 << " gap=" << r.gap << " xi=" << r.xi_mean << " +- " << r.xi_stderr
                 << " (crossed " << r.times.size() << "/" << r.reps
                 << ", censored " << r.censored << ", aborted " << r.aborted << ")\n";
        }
    }
    return rows;
}

double spin_gap_oracle(const SpinModel& model) {
    if (model.kind == SpinModel::Kind::Chain)
        return free_fermion_gap(model.n_spins, model.j, model.gamma);
    return exact_diag_gap(model).gap;
}

GfmcPointResult run_gfmc_point(const GfmcExperimentPoint& pt, std::uint64_t master_seed,
                               std::uint64_t point_index, int threads) {
    const SpinModel& model = pt.model;
    GfmcPointResult row;
    row.model = model.kind == SpinModel::Kind::Chain ? "chain" : "shamrock";
    row.n = model.n_spins;
    row.leaves = model.leaves;
    row.j = model.j;
    row.gamma = model.gamma;
    row.epsilon = model.epsilon;
    row.gap = spin_gap_oracle(model);

    SpinGuiding gwf;
    switch (pt.gwf_mode) {
        case SpinGuiding::Mode::None:
            gwf = SpinGuiding::none();
            break;
        case SpinGuiding::Mode::Boltzmann: {
            double beta = pt.beta;
            if (beta <= 0.0)
                beta = optimize_boltzmann_beta_spin(model, 0.005, 3.0,
                                                    derive_seed(master_seed, point_index, 900))
                           .beta;
            gwf = SpinGuiding::boltzmann(beta);
            row.beta = beta;
            break;
        }
        case SpinGuiding::Mode::Urbm: {
            Urbm u = pt.urbm;
            if (u.n == 0) {
                SrOptions opts;
                opts.seed = derive_seed(master_seed, point_index, 901);
                opts.init_k1 = 0.1;
                opts.init_k2 = 0.05;
                opts.init_k3 = 0.1;
                u = optimize_urbm(model, opts).couplings;
            }
            u.n = model.n_spins;
            gwf = SpinGuiding::unrestricted_boltzmann_machine(u);
            row.k1 = u.k1;
            row.k2 = u.k2;
            row.k3 = u.k3;
            break;
        }
        case SpinGuiding::Mode::ExactTable: {
            EdGroundState gs = exact_diag_ground_state(model);
            gwf = SpinGuiding::exact_table(std::move(gs.amplitudes));
            break;
        }
    }

    GfmcConfig cfg;
    cfg.time_step = pt.tau > 0.0 ? pt.tau : suggested_time_step(model);
    cfg.target_walkers = pt.nw;
    cfg.crossing_fraction = pt.p;
    cfg.hidden_sweeps_per_step = pt.hidden_sweeps;
    cfg.max_time = pt.max_time;

    std::vector<SpinTunnelingSample> samples(pt.reps);
    parallel_for_index(pt.reps, threads, [&](std::size_t rep) {
        samples[rep] = measure_tunneling_time_spin(cfg, gwf, model,
                                                   derive_seed(master_seed, point_index, rep));
    });

    row.gwf = gwf.label();
    row.tau = cfg.time_step;
    row.nw = pt.nw;
    row.p = pt.p;
    row.reps = pt.reps;
    for (const auto& s : samples) {
        switch (s.status) {
            case SpinTunnelingSample::Status::Crossed: row.times.push_back(s.time); break;
            case SpinTunnelingSample::Status::Censored: ++row.censored; break;
            default: ++row.aborted; break;
        }
    }
    aggregate_times(row.times, row.xi_mean, row.xi_stderr);
    return row;
}

std::vector<GfmcPointResult> run_gfmc_sweep(const std::vector<GfmcExperimentPoint>& points,
                                            std::uint64_t master_seed, int threads,
                                            std::ostream* log) {
    std::vector<GfmcPointResult> rows;
    rows.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        rows.push_back(run_gfmc_point(points[i], master_seed, i, threads));
        if (log) {
            const auto& r = rows.back();
            *log << "gfmc point " << r.model << " n=" << r.n << " gwf=" << r.gwf
                 << " tau=" << r.tau << " gap=" << r.gap << " xi=" << r.xi_mean << " +- "
                 << r.xi_stderr << " (crossed " << r.times.size() << "/" << r.reps
                 << ", censored " << r.censored << ", aborted " << r.aborted << ")\n";
        }
    }
    return rows;
}

// ----------------------------------------------------------------- CSV I/O

void write_dmc_csv(const std::string& path, const std::vector<DmcPointResult>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17);
    f << "# pqmc-csv-v1 dmc-tunnel\n";
    f << "g,x0,gwf,tau,nw,p,xth,reps,xi_mean,xi_stderr,censored\n";
    for (const auto& r : rows) {
        f << r.g << ',' << r.x0 << ',' << csv_escape(r.gwf) << ',' << r.tau << ',' << r.nw
          << ',' << r.p << ',' << r.xth << ',' << r.reps << ',' << r.xi_mean << ','
          << r.xi_stderr << ',' << r.censored << '\n';
    }
}

void write_gfmc_csv(const std::string& path, const std::vector<GfmcPointResult>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17);
    f << "# pqmc-csv-v1 gfmc-tunnel\n";
    f << "model,n,leaves,j,gamma,epsilon,gwf,tau,nw,p,reps,xi_mean,xi_stderr,censored\n";
    for (const auto& r : rows) {
        f << csv_escape(r.model) << ',' << r.n << ',' << r.leaves << ',' << r.j << ','
          << r.gamma << ',' << r.epsilon << ',' << csv_escape(r.gwf) << ',' << r.tau << ','
          << r.nw << ',' << r.p << ',' << r.reps << ',' << r.xi_mean << ',' << r.xi_stderr
          << ',' << r.censored << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(item);
    return out;
}

} // namespace

std::vector<DmcPointResult> read_dmc_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(f, line);
    if (line.rfind("# pqmc-csv-v1 dmc-tunnel", 0) != 0)
        throw std::runtime_error(path + ": not a dmc-tunnel CSV");
    std::getline(f, line);  // column header
    std::vector<DmcPointResult> rows;
    std::map<std::pair<double, double>, double> gapCache;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() != 11) throw std::runtime_error(path + ": malformed row");
        DmcPointResult r;
        r.g = std::stod(c[0]);
        r.x0 = std::stod(c[1]);
        r.gwf = c[2];
        r.tau = std::stod(c[3]);
        r.nw = static_cast<std::size_t>(std::stoul(c[4]));
        r.p = std::stod(c[5]);
        r.xth = std::stod(c[6]);
        r.reps = std::stoi(c[7]);
        r.xi_mean = std::stod(c[8]);
        r.xi_stderr = std::stod(c[9]);
        r.censored = std::stoi(c[10]);
        // the row schema stores no gap; re-derive it from the oracle
        const auto key = std::make_pair(r.g, r.x0);
        auto it = gapCache.find(key);
        if (it == gapCache.end()) {
            const PotentialSpec pot = r.x0 > 0.0 ? PotentialSpec::plateau(r.g, r.x0)
                                                 : PotentialSpec::quartic(r.g);
            const double gap = solve_lowest_two(pot, default_spectral_grid(pot)).gap;
            it = gapCache.emplace(key, gap).first;
        }
        r.gap = it->second;
        if (std::isfinite(r.xi_mean)) {
            // synthesize the usability count: censored rows keep their deficit
            const int crossed = std::max(0, r.reps - r.censored);
            r.times.assign(crossed, r.xi_mean);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<GfmcPointResult> read_gfmc_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(f, line);
    if (line.rfind("# pqmc-csv-v1 gfmc-tunnel", 0) != 0)
        throw std::runtime_error(path + ": not a gfmc-tunnel CSV");
    std::getline(f, line);
    std::vector<GfmcPointResult> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() != 14) throw std::runtime_error(path + ": malformed row");
        GfmcPointResult r;
        r.model = c[0];
        r.n = std::stoi(c[1]);
        r.leaves = std::stoi(c[2]);
        r.j = std::stod(c[3]);
        r.gamma = std::stod(c[4]);
        r.epsilon = std::stod(c[5]);
        r.gwf = c[6];
        r.tau = std::stod(c[7]);
        r.nw = static_cast<std::size_t>(std::stoul(c[8]));
        r.p = std::stod(c[9]);
        r.reps = std::stoi(c[10]);
        r.xi_mean = std::stod(c[11]);
        r.xi_stderr = std::stod(c[12]);
        r.censored = std::stoi(c[13]);
        const SpinModel model = r.model == "chain"
                                    ? SpinModel::chain(r.n, r.j, r.gamma)
                                    : SpinModel::shamrock(r.leaves, r.j, r.epsilon, r.gamma);
        r.gap = spin_gap_oracle(model);
        if (std::isfinite(r.xi_mean)) {
            const int crossed = std::max(0, r.reps - r.censored);
            r.times.assign(crossed, r.xi_mean);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------- reports

namespace {

template <class Row>
ReportOutcome emit_report_impl(const std::string& path, const std::vector<Row>& rows,
                               int fit_window, const ReportOptions& opts,
                               const std::function<void(std::ostream&, const Row&)>& printRow,
                               const std::vector<std::vector<double>>& samplesPerUsableRow) {
    ReportOutcome outcome;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(10);
    f << "pqmc tunneling report\n";
    f << "points: " << rows.size() << "\n\n";
    for (const auto& r : rows) printRow(f, r);
    f << "\n";

    const std::vector<ScalingPoint> pts = scaling_points(rows);
    if (static_cast<int>(pts.size()) >= 3 && fit_window >= 3) {
        const PowerLawFit fit = fit_power_law(pts, fit_window);
        outcome.fit = fit;
        double bErr = fit.b_err;
        if (!samplesPerUsableRow.empty()) {
            outcome.bootstrap_b_err =
                bootstrap_b_error(pts, samplesPerUsableRow, fit_window);
            bErr = std::max(bErr, outcome.bootstrap_b_err);
        }
        f << "fit xi = alpha / gap^b over " << fit.fit_window << "\n";
        f << "  alpha = " << fit.alpha << " +- " << fit.alpha_err << "\n";
        f << "  b     = " << fit.b << " +- " << bErr;
        if (outcome.bootstrap_b_err > 0.0)
            f << "  (least-squares " << fit.b_err << ", bootstrap "
              << outcome.bootstrap_b_err << ")";
        f << "\n";
        if (opts.reference_alpha) f << "  reference alpha = " << *opts.reference_alpha << "\n";
        if (opts.reference_b) f << "  reference b     = " << *opts.reference_b << "\n";
        if (opts.b_min && fit.b < *opts.b_min) outcome.ok = false;
        if (opts.b_max && fit.b > *opts.b_max) outcome.ok = false;
        if (opts.b_min || opts.b_max)
            f << "  acceptance band b in [" << opts.b_min.value_or(-1e9) << ", "
              << opts.b_max.value_or(1e9) << "]: " << (outcome.ok ? "OK" : "VIOLATED") << "\n";
    } else {
        f << "fit: skipped (" << pts.size() << " usable points)\n";
    }
    return outcome;
}

} // namespace

ReportOutcome emit_dmc_report(const std::string& path,
                              const std::vector<DmcPointResult>& rows, int fit_window,
                              const ReportOptions& opts) {
    std::vector<std::vector<double>> samples;
    for (const auto& r : rows)
        if (r.usable()) samples.push_back(r.times);
    return emit_report_impl<DmcPointResult>(
        path, rows, fit_window, opts,
        [](std::ostream& f, const DmcPointResult& r) {
            f << "g=" << r.g << " x0=" << r.x0 << " gwf=" << r.gwf << " gap=" << r.gap
              << " 1/gap=" << 1.0 / r.gap << " xi=" << r.xi_mean << " +- " << r.xi_stderr
              << " censored=" << r.censored << " aborted=" << r.aborted;
            if (r.gwf == "boltzmann") f << " beta=" << r.beta;
            f << "\n";
        },
        samples);
}

ReportOutcome emit_gfmc_report(const std::string& path,
                               const std::vector<GfmcPointResult>& rows, int fit_window,
                               const ReportOptions& opts) {
    std::vector<std::vector<double>> samples;
    for (const auto& r : rows)
        if (r.usable()) samples.push_back(r.times);
    ReportOutcome outcome = emit_report_impl<GfmcPointResult>(
        path, rows, fit_window, opts,
        [](std::ostream& f, const GfmcPointResult& r) {
            f << r.model << " n=" << r.n;
            if (r.model == "shamrock") f << " leaves=" << r.leaves;
            f << " gamma=" << r.gamma << " gwf=" << r.gwf << " gap=" << r.gap
              << " 1/gap=" << 1.0 / r.gap << " xi=" << r.xi_mean << " +- " << r.xi_stderr
              << " censored=" << r.censored << " aborted=" << r.aborted;
            if (r.gwf == "boltzmann") f << " beta=" << r.beta;
            if (r.gwf == "urbm")
                f << " k1=" << r.k1 << " k2=" << r.k2 << " k3=" << r.k3;
            f << "\n";
        },
        samples);
    if (opts.pimc_reference) {
        std::ofstream f(path, std::ios::app);
        f << std::setprecision(10);
        f << "\npath-integral reference curve 2^K / gap^2:\n";
        for (const auto& r : rows)
            if (r.model == "shamrock")
                f << "  K=" << r.leaves << " gap=" << r.gap << " ref="
                  << std::ldexp(1.0, r.leaves) / (r.gap * r.gap) << "\n";
    }
    return outcome;
}

// ------------------------------------------------------------- experiments

namespace {

int run_dmc_tunnel_experiment(const KeyValueConfig& cfg, std::ostream& log) {
    const std::string potName = cfg.get_string("potential", "quartic");
    const std::string gwfName = cfg.get_string("gwf", "none");
    std::vector<double> gList, x0List;
    if (cfg.has("g_list")) gList = cfg.get_double_list("g_list");
    else gList = {cfg.get_double("g")};
    if (cfg.has("x0_list")) x0List = cfg.get_double_list("x0_list");
    else x0List = {cfg.get_double("x0", 0.0)};
    if (gList.size() > 1 && x0List.size() > 1)
        throw std::runtime_error("dmc-tunnel: sweep either g_list or x0_list, not both");

    std::vector<double> tauList;
    if (cfg.has("tau_list")) tauList = cfg.get_double_list("tau_list");
    const double tau = cfg.get_double("tau", 0.02);

    std::vector<DmcExperimentPoint> points;
    const std::size_t count = std::max(gList.size(), x0List.size());
    for (std::size_t i = 0; i < count; ++i) {
        DmcExperimentPoint pt;
        const double g = gList[std::min(i, gList.size() - 1)];
        const double x0 = x0List[std::min(i, x0List.size() - 1)];
        pt.pot = (potName == "plateau" || x0 > 0.0) ? PotentialSpec::plateau(g, x0)
                                                    : PotentialSpec::quartic(g);
        pt.gwf_mode = gwf_mode_1d(gwfName);
        pt.beta = cfg.get_double("beta", -1.0);
        pt.tau = tauList.empty() ? tau : tauList[std::min(i, tauList.size() - 1)];
        pt.nw = cfg.get_int("nw", 2000);
        pt.p = cfg.get_double("p", 0.25);
        pt.xth_factor = cfg.get_double("xth_factor", 0.5);
        pt.reps = static_cast<int>(cfg.get_int("reps", 50));
        pt.max_time = cfg.get_double("max_time", 1e6);
        points.push_back(pt);
    }

    const auto rows = run_dmc_sweep(points, cfg.get_int("seed", 1),
                                    static_cast<int>(cfg.get_int("threads", 1)), &log);
    const std::string out = cfg.get_string("out", "dmc_tunnel.csv");
    write_dmc_csv(out, rows);
    log << "wrote " << out << "\n";

    if (cfg.has("report")) {
        ReportOptions ropts;
        if (cfg.has("reference_alpha")) ropts.reference_alpha = cfg.get_double("reference_alpha");
        if (cfg.has("reference_b")) ropts.reference_b = cfg.get_double("reference_b");
        if (cfg.has("b_min")) ropts.b_min = cfg.get_double("b_min");
        if (cfg.has("b_max")) ropts.b_max = cfg.get_double("b_max");
        const auto outcome = emit_dmc_report(cfg.get_string("report"), rows,
                                             static_cast<int>(cfg.get_int("fit_window", 5)),
                                             ropts);
        log << "wrote " << cfg.get_string("report") << "\n";
        return outcome.ok ? 0 : 2;
    }
    return 0;
}

int run_gfmc_tunnel_experiment(const KeyValueConfig& cfg, std::ostream& log) {
    const std::string modelName = cfg.get_string("model", "chain");
    const double j = cfg.get_double("j", 1.0);
    const double gamma = cfg.get_double("gamma");
    const double epsilon = cfg.get_double("epsilon", 0.2);

    std::vector<long> axis;
    const bool chain = modelName == "chain";
    if (chain) axis = cfg.has("n_list") ? cfg.get_int_list("n_list")
                                        : std::vector<long>{cfg.get_int("n")};
    else axis = cfg.has("k_list") ? cfg.get_int_list("k_list")
                                  : std::vector<long>{cfg.get_int("k")};

    std::vector<double> tauList;
    if (cfg.has("tau_list")) tauList = cfg.get_double_list("tau_list");

    std::vector<GfmcExperimentPoint> points;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        GfmcExperimentPoint pt;
        pt.model = chain ? SpinModel::chain(static_cast<int>(axis[i]), j, gamma)
                         : SpinModel::shamrock(static_cast<int>(axis[i]), j, epsilon, gamma);
        pt.gwf_mode = spin_gwf_mode(cfg.get_string("gwf", "none"));
        pt.beta = cfg.get_double("beta", -1.0);
        if (cfg.has("gwf_file")) {
            const GwfRecord rec = read_gwf_record(cfg.get_string("gwf_file"));
            pt.beta = rec.beta;
            pt.urbm = Urbm{rec.k1, rec.k2, rec.k3, pt.model.n_spins};
        } else if (cfg.has("k1") || cfg.has("k2") || cfg.has("k3")) {
            pt.urbm = Urbm{cfg.get_double("k1", 0.0), cfg.get_double("k2", 0.0),
                           cfg.get_double("k3", 0.0), pt.model.n_spins};
        }
        pt.tau = tauList.empty() ? cfg.get_double("tau", -1.0)
                                 : tauList[std::min(i, tauList.size() - 1)];
        pt.nw = cfg.get_int("nw", 2000);
        pt.p = cfg.get_double("p", 0.10);
        pt.reps = static_cast<int>(cfg.get_int("reps", 200));
        pt.max_time = cfg.get_double("max_time", 1e6);
        pt.hidden_sweeps = static_cast<int>(cfg.get_int("hidden_sweeps", 5));
        points.push_back(pt);
    }

    const auto rows = run_gfmc_sweep(points, cfg.get_int("seed", 1),
                                     static_cast<int>(cfg.get_int("threads", 1)), &log);
    const std::string out = cfg.get_string("out", "gfmc_tunnel.csv");
    write_gfmc_csv(out, rows);
    log << "wrote " << out << "\n";

    if (cfg.has("report")) {
        ReportOptions ropts;
        if (cfg.has("reference_alpha")) ropts.reference_alpha = cfg.get_double("reference_alpha");
        if (cfg.has("reference_b")) ropts.reference_b = cfg.get_double("reference_b");
        if (cfg.has("b_min")) ropts.b_min = cfg.get_double("b_min");
        if (cfg.has("b_max")) ropts.b_max = cfg.get_double("b_max");
        ropts.pimc_reference = cfg.get_bool("pimc_reference", !chain);
        const auto outcome = emit_gfmc_report(cfg.get_string("report"), rows,
                                              static_cast<int>(cfg.get_int("fit_window", 5)),
                                              ropts);
        log << "wrote " << cfg.get_string("report") << "\n";
        return outcome.ok ? 0 : 2;
    }
    return 0;
}

int run_gap_experiment(const KeyValueConfig& cfg, std::ostream& log) {
    const std::string modelName = cfg.get_string("model", "chain");
    const double j = cfg.get_double("j", 1.0);
    const double gamma = cfg.get_double("gamma");
    const double epsilon = cfg.get_double("epsilon", 0.2);
    const bool chain = modelName == "chain";
    std::vector<long> axis;
    if (chain) axis = cfg.has("n_list") ? cfg.get_int_list("n_list")
                                        : std::vector<long>{cfg.get_int("n")};
    else axis = cfg.has("k_list") ? cfg.get_int_list("k_list")
                                  : std::vector<long>{cfg.get_int("k")};

    const std::string out = cfg.get_string("out", "gaps.csv");
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << std::setprecision(17);
    f << "# pqmc-csv-v1 gap\n";
    f << "model,n,leaves,j,gamma,epsilon,gap\n";
    for (long a : axis) {
        const SpinModel model = chain
                                    ? SpinModel::chain(static_cast<int>(a), j, gamma)
                                    : SpinModel::shamrock(static_cast<int>(a), j, epsilon, gamma);
        const double gap = spin_gap_oracle(model);
        f << modelName << ',' << model.n_spins << ',' << model.leaves << ',' << j << ','
          << gamma << ',' << (chain ? 0.0 : epsilon) << ',' << gap << '\n';
        log << modelName << " n=" << model.n_spins << " gap=" << gap << "\n";
    }
    log << "wrote " << out << "\n";
    return 0;
}

int run_spectrum_experiment(const KeyValueConfig& cfg, std::ostream& log) {
    const double g = cfg.get_double("g");
    const double x0 = cfg.get_double("x0", 0.0);
    const PotentialSpec pot =
        x0 > 0.0 ? PotentialSpec::plateau(g, x0) : PotentialSpec::quartic(g);
    const Grid1D grid = make_symmetric_grid(
        pot.right_minimum() + cfg.get_double("grid_margin", 6.0),
        cfg.get_double("grid_spacing", 0.005));
    const SpectralResult sr = solve_lowest_two(pot, grid);
    log << "e0 = " << std::setprecision(12) << sr.e0 << "\n";
    log << "e1 = " << sr.e1 << "\n";
    log << "gap = " << sr.gap << "  (1/gap = " << 1.0 / sr.gap << ")\n";
    if (cfg.has("out")) {
        write_spectrum_csv(cfg.get_string("out"), pot, sr);
        log << "wrote " << cfg.get_string("out") << "\n";
    }
    return 0;
}

int run_optimize_gwf_experiment(const KeyValueConfig& cfg, std::ostream& log) {
    const std::string gwfName = cfg.get_string("gwf");
    GwfRecord rec;
    rec.gwf_kind = gwfName;
    if (cfg.has("potential") || cfg.has("g")) {
        const double g = cfg.get_double("g");
        const double x0 = cfg.get_double("x0", 0.0);
        const PotentialSpec pot =
            x0 > 0.0 ? PotentialSpec::plateau(g, x0) : PotentialSpec::quartic(g);
        if (gwfName != "boltzmann")
            throw std::runtime_error("optimize-gwf: continuum optimization is Boltzmann-only");
        const BetaOptimum opt = optimize_boltzmann_beta(pot, default_spectral_grid(pot));
        rec.model_label = "doublewell g=" + std::to_string(g) + " x0=" + std::to_string(x0);
        rec.beta = opt.beta;
        rec.energy = opt.energy;
        log << "beta* = " << opt.beta << "  energy = " << opt.energy
            << (opt.at_edge ? "  [unconverged: interval edge]" : "") << "\n";
    } else {
        const std::string modelName = cfg.get_string("model", "chain");
        const double j = cfg.get_double("j", 1.0);
        const double gamma = cfg.get_double("gamma");
        const double epsilon = cfg.get_double("epsilon", 0.2);
        const SpinModel model =
            modelName == "chain"
                ? SpinModel::chain(static_cast<int>(cfg.get_int("n")), j, gamma)
                : SpinModel::shamrock(static_cast<int>(cfg.get_int("k")), j, epsilon, gamma);
        rec.model_label = modelName + " n=" + std::to_string(model.n_spins) +
                          " gamma=" + std::to_string(gamma);
        if (gwfName == "boltzmann") {
            const SpinBetaOptimum opt =
                optimize_boltzmann_beta_spin(model, 0.005, 3.0, cfg.get_int("seed", 1));
            rec.beta = opt.beta;
            rec.energy = opt.energy;
            log << "beta* = " << opt.beta << "  energy = " << opt.energy
                << (opt.flat ? "  [flat direction flagged]" : "") << "\n";
        } else if (gwfName == "urbm") {
            SrOptions opts;
            opts.seed = cfg.get_int("seed", 1);
            opts.iterations = static_cast<int>(cfg.get_int("sr_iterations", 200));
            opts.samples_per_iteration =
                static_cast<int>(cfg.get_int("sr_samples", 5000));
            opts.hidden_sweeps = static_cast<int>(cfg.get_int("hidden_sweeps", 5));
            opts.init_k1 = cfg.get_double("k1", 0.1);
            opts.init_k2 = cfg.get_double("k2", 0.05);
            opts.init_k3 = cfg.get_double("k3", 0.1);
            const SrResult res = optimize_urbm(model, opts);
            rec.k1 = res.couplings.k1;
            rec.k2 = res.couplings.k2;
            rec.k3 = res.couplings.k3;
            rec.energy = res.energy;
            rec.energy_stderr = res.energy_stderr;
            log << "k1 = " << rec.k1 << "  k2 = " << rec.k2 << "  k3 = " << rec.k3
                << "  energy = " << rec.energy << " +- " << rec.energy_stderr << " ("
                << res.iterations_used << " iterations)\n";
        } else {
            throw std::runtime_error("optimize-gwf: unsupported gwf '" + gwfName + "'");
        }
    }
    if (cfg.has("out")) {
        write_gwf_record(cfg.get_string("out"), rec);
        log << "wrote " << cfg.get_string("out") << "\n";
    }
    return 0;
}

int run_fit_experiment(const KeyValueConfig& cfg, std::ostream& log) {
    const std::string in = cfg.get_string("in");
    std::ifstream probe(in);
    if (!probe) throw std::runtime_error("cannot read " + in);
    std::string header;
    std::getline(probe, header);
    probe.close();

    ReportOptions ropts;
    if (cfg.has("reference_alpha")) ropts.reference_alpha = cfg.get_double("reference_alpha");
    if (cfg.has("reference_b")) ropts.reference_b = cfg.get_double("reference_b");
    if (cfg.has("b_min")) ropts.b_min = cfg.get_double("b_min");
    if (cfg.has("b_max")) ropts.b_max = cfg.get_double("b_max");
    const int window = static_cast<int>(cfg.get_int("fit_window", 5));
    const std::string report = cfg.get_string("report", "fit_report.txt");

    ReportOutcome outcome;
    if (header.find("dmc-tunnel") != std::string::npos) {
        outcome = emit_dmc_report(report, read_dmc_csv(in), window, ropts);
    } else if (header.find("gfmc-tunnel") != std::string::npos) {
        ropts.pimc_reference = cfg.get_bool("pimc_reference", false);
        outcome = emit_gfmc_report(report, read_gfmc_csv(in), window, ropts);
    } else {
        throw std::runtime_error(in + ": unrecognized CSV header");
    }
    if (outcome.fit)
        log << "alpha = " << outcome.fit->alpha << " +- " << outcome.fit->alpha_err
            << ", b = " << outcome.fit->b << " +- "
            << std::max(outcome.fit->b_err, outcome.bootstrap_b_err) << "\n";
    log << "wrote " << report << "\n";
    return outcome.ok ? 0 : 2;
}

} // namespace

int run_experiment(const KeyValueConfig& cfg, std::ostream& log) {
    const std::string kind = cfg.get_string("experiment");
    if (kind == "dmc-tunnel") return run_dmc_tunnel_experiment(cfg, log);
    if (kind == "gfmc-tunnel") return run_gfmc_tunnel_experiment(cfg, log);
    if (kind == "gap") return run_gap_experiment(cfg, log);
    if (kind == "spectrum") return run_spectrum_experiment(cfg, log);
    if (kind == "optimize-gwf") return run_optimize_gwf_experiment(cfg, log);
    if (kind == "fit") return run_fit_experiment(cfg, log);
    throw std::runtime_error("unknown experiment '" + kind + "'");
}

} // namespace pqmc
