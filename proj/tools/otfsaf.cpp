// otfsaf - command-line front end.
//
//   otfsaf af|moments|montecarlo|metrics|compare|table1|validate [options]
//
// Exit codes: 0 success, 1 validation failure, 2 bad arguments.

#include "otfsaf/emit.hpp"
#include "otfsaf/experiments.hpp"
#include "otfsaf/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace otfsaf;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::size_t n = 4;
    std::size_t m = 0;  // 0: subcommand default (8 for table1, else 4)
    double t = 1.0;
    int qam = 4;
    std::uint64_t seed = 1;
    std::size_t realizations = 1000;
    int tau_spt = 16;
    int fd_spdf = 16;
    double fd_max = 10.0;
    std::string waveform = "otfs";
    std::string out;
    std::string format = "csv";
    unsigned threads = default_thread_count();
    std::vector<std::size_t> m_values{2, 4, 8, 16};
    std::vector<int> orders{4, 8, 16, 32};
    int oversample = 64;
};

void add_grid_flags(CLI::App* sub, Options& o) {
    sub->add_option("--n", o.n, "Time slots / Doppler bins N")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--m", o.m, "Subcarriers / delay bins M [4; 8 for table1]")->check(CLI::PositiveNumber);
    sub->add_option("--t", o.t, "Symbol duration T [s]")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_data_flags(CLI::App* sub, Options& o) {
    sub->add_option("--qam", o.qam, "QAM order")->check(CLI::IsMember({4, 8, 16, 32, 64}))->capture_default_str();
    sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
}

void add_axis_flags(CLI::App* sub, Options& o) {
    sub->add_option("--tau-samples-per-t", o.tau_spt, "Delay samples per T")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--fd-samples-per-df", o.fd_spdf, "Doppler samples per df")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--fd-max", o.fd_max, "Doppler extent in units of df")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

void add_output_flags(CLI::App* sub, Options& o) {
    sub->add_option("--out", o.out, "Output file (default: stdout)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_realization_flags(CLI::App* sub, Options& o) {
    sub->add_option("--realizations", o.realizations, "Monte Carlo realizations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

void add_waveform_flag(CLI::App* sub, Options& o) {
    sub->add_option("--waveform", o.waveform, "otfs or ofdm")
        ->check(CLI::IsMember({"otfs", "ofdm"}))
        ->capture_default_str();
}

WaveformKind waveform_of(const Options& o) { return o.waveform == "ofdm" ? WaveformKind::Ofdm : WaveformKind::Otfs; }

AxisDensity density_of(const Options& o) { return {o.tau_spt, o.fd_spdf, o.fd_max}; }

Json config_echo(const std::string& command, const Options& o) {
    return {{"command", command},
            {"N", o.n},
            {"M", o.m},
            {"T", o.t},
            {"delta_f", 1.0 / o.t},
            {"order", o.qam},
            {"seed", o.seed},
            {"realizations", o.realizations},
            {"waveform", o.waveform},
            {"tau_samples_per_t", o.tau_spt},
            {"fd_samples_per_df", o.fd_spdf},
            {"fd_max_df", o.fd_max},
            {"tau_extent_t", o.n}};
}

void write(const ResultDocument& doc, const Options& o) {
    const OutputFormat f = parse_output_format(o.format);
    if (o.out.empty()) {
        emit(doc, std::cout, f);
    } else {
        emit(doc, o.out, f);
    }
}

ExperimentConfig experiment_of(const Options& o) {
    ExperimentConfig ec = ExperimentConfig::make(o.n, o.m, o.qam, o.realizations, o.seed, density_of(o), o.t);
    ec.waveform_kind = waveform_of(o);
    ec.threads = o.threads;
    ec.validate();
    return ec;
}

int run_af(const Options& o) {
    const ExperimentConfig ec = experiment_of(o);
    const DdSymbolGrid x = realization_symbols(make_qam(o.qam), ec.cfg, o.seed, 0);
    const AfGrid g = AfEvaluator(ec.cfg, ec.axes).evaluate(map_symbols(x, ec.cfg, ec.waveform_kind), o.threads);

    ResultDocument doc;
    doc.config = config_echo("af", o);
    doc.config.erase("realizations");
    doc.table.columns = {"tau", "fd", "re", "im", "abs"};
    for (std::size_t i = 0; i < g.axes.tau_values.size(); ++i) {
        for (std::size_t j = 0; j < g.axes.fd_values.size(); ++j) {
            const Complex v = g.values(i, j);
            doc.table.rows.push_back({g.axes.tau_values[i], g.axes.fd_values[j], v.real(), v.imag(), std::abs(v)});
        }
    }
    write(doc, o);
    return kExitOk;
}

int run_moments(const Options& o) {
    const ExperimentConfig ec = experiment_of(o);
    const MomentSurfaces s = moment_surfaces(ec.cfg, moments(make_qam(o.qam)), ec.axes, o.threads);
    ResultDocument doc;
    doc.config = config_echo("moments", o);
    doc.config.erase("realizations");
    doc.config.erase("waveform");
    doc.table = grid_table(s.axes, {{"mean_abs_complex", &s.mean_abs_complex},
                                    {"second_moment", &s.second_moment},
                                    {"rice_mean", &s.rice_mean},
                                    {"rice_var", &s.rice_var},
                                    {"mean_lower", &s.mean_lower},
                                    {"mean_upper", &s.mean_upper},
                                    {"var_upper", &s.var_upper}});
    write(doc, o);
    return kExitOk;
}

int run_montecarlo(const Options& o) {
    const ExperimentConfig ec = experiment_of(o);
    const McMomentEstimate mc = run_mc_moments(ec);
    RealMatrix re(mc.mean_complex.rows(), mc.mean_complex.cols());
    RealMatrix im(re.rows(), re.cols());
    for (std::size_t k = 0; k < re.size(); ++k) {
        re.data()[k] = mc.mean_complex.data()[k].real();
        im.data()[k] = mc.mean_complex.data()[k].imag();
    }
    ResultDocument doc;
    doc.config = config_echo("montecarlo", o);
    doc.table = grid_table(mc.axes, {{"mean_mag", &mc.mean_mag},
                                     {"var_mag", &mc.var_mag},
                                     {"mean_sq_mag", &mc.mean_sq_mag},
                                     {"mean_re", &re},
                                     {"mean_im", &im}});
    write(doc, o);
    return kExitOk;
}

int run_metrics(const Options& o) {
    const ExperimentConfig ec = experiment_of(o);
    const auto samples = sidelobe_distribution(ec);
    ResultDocument doc;
    doc.config = config_echo("metrics", o);
    doc.config["mainlobe"] = {{"tau_half_width", ec.region.tau_half_width}, {"fd_half_width", ec.region.fd_half_width}};
    doc.table.columns = {"realization", "pslr_db", "islr_db"};
    RunningStats p, q;
    double pmin = samples.front().pslr_db, pmax = pmin, imin = samples.front().islr_db, imax = imin;
    for (std::size_t r = 0; r < samples.size(); ++r) {
        doc.table.rows.push_back({static_cast<std::int64_t>(r), samples[r].pslr_db, samples[r].islr_db});
        p.push(samples[r].pslr_db);
        q.push(samples[r].islr_db);
        pmin = std::min(pmin, samples[r].pslr_db);
        pmax = std::max(pmax, samples[r].pslr_db);
        imin = std::min(imin, samples[r].islr_db);
        imax = std::max(imax, samples[r].islr_db);
    }
    doc.summary = {{"pslr_db", {{"min", pmin}, {"max", pmax}, {"mean", p.mean}}},
                   {"islr_db", {{"min", imin}, {"max", imax}, {"mean", q.mean}}}};
    write(doc, o);
    return kExitOk;
}

int run_compare(const Options& o) {
    CompareOptions opt;
    opt.qam_order = o.qam;
    opt.t = o.t;
    opt.density = density_of(o);
    opt.threads = o.threads;
    const auto rows = compare_otfs_ofdm(o.n, o.m_values, o.realizations, o.seed, opt);
    ResultDocument doc;
    doc.config = config_echo("compare", o);
    doc.config.erase("M");
    doc.config.erase("waveform");
    doc.config["M_values"] = o.m_values;
    doc.table.columns = {"waveform", "m", "mean_pslr_db", "mean_islr_db"};
    for (const auto& r : rows) {
        doc.table.rows.push_back({to_string(r.waveform), static_cast<std::int64_t>(r.m), r.mean_pslr_db, r.mean_islr_db});
    }
    write(doc, o);
    return kExitOk;
}

int run_table1(const Options& o) {
    Table1Options opt;
    opt.n = o.n;
    opt.m = o.m;
    opt.t = o.t;
    opt.density = density_of(o);
    opt.threads = o.threads;
    const auto rows = reproduce_table1(o.orders, o.realizations, o.seed, opt);
    ResultDocument doc;
    doc.config = config_echo("table1", o);
    doc.config.erase("order");
    doc.config.erase("waveform");
    doc.config["orders"] = o.orders;
    doc.table.columns = {"order", "mean_approx_err", "mean_bound_err", "var_approx_err", "var_bound_err"};
    for (const auto& r : rows) {
        doc.table.rows.push_back({static_cast<std::int64_t>(r.qam_order), r.mean_approx_err, r.mean_bound_err,
                                  r.var_approx_err, r.var_bound_err});
    }
    write(doc, o);
    return kExitOk;
}

int run_validate(const Options& o) {
    std::vector<CheckResult> checks = enumeration_checks(GridConfig::make(2, 2), 4);
    checks.push_back(matched_filter_check(GridConfig::make(o.n, o.m, o.t), o.qam, 10, 25, o.seed, o.oversample));

    bool ok = true;
    ResultDocument doc;
    doc.config = config_echo("validate", o);
    doc.config.erase("realizations");
    doc.table.columns = {"check", "passed", "worst", "detail"};
    for (const auto& c : checks) {
        ok = ok && c.passed;
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        doc.table.rows.push_back({c.name, static_cast<std::int64_t>(c.passed), c.worst, c.detail});
    }
    if (!o.out.empty()) write(doc, o);
    return ok ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ambiguity-function statistics of data-modulated OTFS / OFDM frames"};
    app.require_subcommand(1);

    Options o;
    CLI::App* af = app.add_subcommand("af", "AF grid of one realization");
    CLI::App* mom = app.add_subcommand("moments", "Closed-form moment surfaces");
    CLI::App* mc = app.add_subcommand("montecarlo", "Monte Carlo mean / variance surfaces");
    CLI::App* met = app.add_subcommand("metrics", "PSLR / ISLR of every realization");
    CLI::App* cmp = app.add_subcommand("compare", "OTFS vs OFDM sidelobe sweep over M");
    CLI::App* t1 = app.add_subcommand("table1", "Relative errors of the Rice approximation and Jensen bounds");
    CLI::App* val = app.add_subcommand("validate", "Enumeration and matched-filter oracles");

    for (CLI::App* sub : {af, mom, mc, met, cmp, t1, val}) {
        add_grid_flags(sub, o);
        add_data_flags(sub, o);
        add_axis_flags(sub, o);
        add_output_flags(sub, o);
    }
    for (CLI::App* sub : {mc, met, cmp, t1}) add_realization_flags(sub, o);
    for (CLI::App* sub : {af, mc, met}) add_waveform_flag(sub, o);
    cmp->add_option("--m-values", o.m_values, "M values to sweep")->check(CLI::PositiveNumber)->delimiter(',');
    t1->add_option("--orders", o.orders, "QAM orders")->check(CLI::IsMember({4, 8, 16, 32, 64}))->delimiter(',');
    val->add_option("--oversample", o.oversample, "Samples per subcarrier period for the matched filter")
        ->check(CLI::Range(2, 1 << 16))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    if (o.m == 0) o.m = t1->parsed() ? 8 : 4;

    try {
        if (af->parsed()) return run_af(o);
        if (mom->parsed()) return run_moments(o);
        if (mc->parsed()) return run_montecarlo(o);
        if (met->parsed()) return run_metrics(o);
        if (cmp->parsed()) return run_compare(o);
        if (t1->parsed()) return run_table1(o);
        if (val->parsed()) return run_validate(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
