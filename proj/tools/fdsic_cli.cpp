#include "fdsic/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>

using namespace fdsic;

namespace {

ExperimentConfig load(const std::string& path, const std::string& out) {
    ExperimentConfig cfg = path.empty() ? ExperimentConfig{} : load_config(path);
    if (!out.empty()) cfg.output_dir = out;
    return cfg;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t used = 0;
        v.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return v;
}

// "a..b" is every integer from a to b; anything else is a comma list.
std::vector<double> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) return parse_list(s);
    const double a = std::stod(s.substr(0, dots));
    const double b = std::stod(s.substr(dots + 2));
    if (a != std::floor(a) || b != std::floor(b) || b < a) throw std::invalid_argument("bad range '" + s + "'");
    std::vector<double> v;
    for (double p = a; p <= b; p += 1.0) v.push_back(p);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Full-duplex self-interference cancellation simulator"};
    app.require_subcommand(1);

    std::string config, out;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "experiment config file")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides [output] dir)");
    };

    auto* sim = app.add_subcommand("simulate", "run the full cancellation pipeline once");
    add_common(sim);

    std::string bw_list = "5e6,10e6,15e6,20e6";
    auto* sbw = app.add_subcommand("sweep-bandwidth", "cancellation versus transmit bandwidth");
    add_common(sbw);
    sbw->add_option("--bw", bw_list, "comma-separated bandwidths in Hz");

    std::string dbm = "-10..19";
    auto* spw = app.add_subcommand("sweep-power", "cancellation versus transmit power");
    add_common(spw);
    spw->add_option("--dbm", dbm, "powers in dBm: a..b or a comma list");

    std::string suite;
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("--suite", suite, "lemma | filters | oracle-delay | poisson")
        ->required()
        ->check(CLI::IsMember({"lemma", "filters", "oracle-delay", "poisson"}));
    ver->add_option("--out", out, "directory for the verdict file");

    std::string which;
    auto* spec = app.add_subcommand("spectrum", "write the PSD of one stage");
    add_common(spec);
    spec->add_option("--stage", which, "pre | rf | digital")->required()->check(CLI::IsMember({"pre", "rf", "digital"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const auto cfg = load(config, out);
            const auto res = simulate(cfg);
            write_outputs(res, cfg.output_dir);
            std::cout << format_report(res);
            return 0;
        }
        if (*sbw) {
            const auto cfg = load(config, out);
            const auto csv = format_bandwidth_csv(run_sweep_bandwidth(cfg, parse_list(bw_list)));
            write_atomic(std::filesystem::path(cfg.output_dir) / "sweep_bandwidth.csv", csv);
            std::cout << csv;
            return 0;
        }
        if (*spw) {
            const auto cfg = load(config, out);
            const auto csv = format_power_csv(run_sweep_power(cfg, parse_range(dbm)));
            write_atomic(std::filesystem::path(cfg.output_dir) / "sweep_power.csv", csv);
            std::cout << csv;
            return 0;
        }
        if (*ver) {
            const auto v = run_verify(suite);
            const std::string text = v.format();
            write_atomic(std::filesystem::path(out.empty() ? "out" : out) / ("verdict_" + suite + ".txt"), text);
            std::cout << text;
            return v.pass() ? 0 : 1;
        }
        if (*spec) {
            const auto cfg = load(config, out);
            const auto res = simulate(cfg);
            const Psd& p = which == "pre" ? res.pre : which == "rf" ? res.rf : res.digital;
            write_psd_csv(p, std::filesystem::path(cfg.output_dir) / (which + ".csv"));
            const auto fit = slope_diagnostic(p, diagnostic_band(cfg.signal, p.bin_hz));
            std::cout << "stage=" << which << "\nbins=" << p.freqs_hz.size() << "\nslope_r2=" << fit.r2
                      << "\nslope_db_per_decade=" << fit.slope_db_per_decade << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
