#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "mehler/csv.hpp"
#include "mehler/kernels.hpp"
#include "mehler/verify.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) throw mehler::ConfigError("bad number in list: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw mehler::ConfigError("empty value list");
    return out;
}

double arg_num(const std::vector<std::string>& args, std::size_t i, double fallback) {
    if (i >= args.size()) return fallback;
    return std::stod(args[i]);
}

// kinds: heat <s-list> [lo hi count]        g1(s, x)
//        plane <s-list> [lo hi count]       g2(s, x, y)
//        absorbing <s-list> <x0> [lo hi n]  p_s(x0, y)
//        flux <s-list> [lo hi count]        k_s(y)
mehler::Table kernel_table(const std::string& kind, const std::vector<std::string>& args) {
    using namespace mehler;
    if (args.empty()) throw ConfigError("kernels: missing s-list argument");
    std::vector<double> svals = parse_list(args[0]);

    if (kind == "plane") {
        double lo = arg_num(args, 1, -3.0), hi = arg_num(args, 2, 3.0);
        int count = static_cast<int>(arg_num(args, 3, 61));
        Table t({"s", "x", "y", "value"});
        for (double s : svals)
            for (int i = 0; i < count; ++i)
                for (int j = 0; j < count; ++j) {
                    double x = lo + (hi - lo) * i / (count - 1);
                    double y = lo + (hi - lo) * j / (count - 1);
                    t.add({cell(s), cell(x), cell(y), cell(kernel_g2(s, x, y))});
                }
        return t;
    }
    if (kind == "absorbing") {
        if (args.size() < 2) throw ConfigError("kernels absorbing: need <s-list> <x0>");
        double x0 = std::stod(args[1]);
        double lo = arg_num(args, 2, 0.0), hi = arg_num(args, 3, 6.0);
        int count = static_cast<int>(arg_num(args, 4, 121));
        Table t({"s", "x", "y", "value"});
        for (double s : svals)
            for (int i = 0; i < count; ++i) {
                double y = lo + (hi - lo) * i / (count - 1);
                t.add({cell(s), cell(x0), cell(y), cell(kernel_p(s, x0, y))});
            }
        return t;
    }
    double lo = arg_num(args, 1, kind == "flux" ? 0.0 : -4.0);
    double hi = arg_num(args, 2, kind == "flux" ? 6.0 : 4.0);
    int count = static_cast<int>(arg_num(args, 3, kind == "flux" ? 121 : 161));
    if (kind == "heat" || kind == "flux") {
        Table t({"s", "x", "value"});
        for (double s : svals)
            for (int i = 0; i < count; ++i) {
                double x = lo + (hi - lo) * i / (count - 1);
                double v = kind == "heat" ? kernel_g1(s, x) : kernel_k(s, x);
                t.add({cell(s), cell(x), cell(v)});
            }
        return t;
    }
    throw ConfigError("kernels: unknown kind '" + kind + "' (heat, plane, absorbing, flux)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skew convolution semigroups and generalized OU processes"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--seed", seed, "override simulation.seed");
    app.add_option("--jobs", jobs, "worker cap (1 reproduces single-threaded output)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "override outputs.dir (kernels: write table here)");

    std::string config_path;
    CLI::App* cmd_verify = app.add_subcommand("verify", "run every check suite on a config");
    cmd_verify->add_option("config", config_path, "experiment config file")->required();
    CLI::App* cmd_sim = app.add_subcommand("simulate", "simulate the ensemble, write CSV outputs");
    cmd_sim->add_option("config", config_path, "experiment config file")->required();

    std::string kind;
    std::vector<std::string> kparams;
    CLI::App* cmd_kern = app.add_subcommand("kernels", "emit a transition kernel table");
    cmd_kern->add_option("kind", kind, "heat | plane | absorbing | flux")->required();
    cmd_kern->add_option("params", kparams, "s-list [kind-specific range args]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_kern->parsed()) {
            mehler::Table t = kernel_table(kind, kparams);
            if (out_dir) {
                std::filesystem::create_directories(*out_dir);
                mehler::write_file((std::filesystem::path(*out_dir) / "kernels.csv").string(),
                                   t.text());
            } else {
                std::fputs(t.text().c_str(), stdout);
            }
            return 0;
        }

        mehler::ExperimentConfig cfg = mehler::load_config(config_path);
        if (seed) cfg.sim_seed = *seed;
        if (out_dir) cfg.out_dir = *out_dir;

        if (cmd_verify->parsed()) {
            mehler::VerifyReport rep = mehler::run_verify(cfg, jobs);
            std::string text = rep.summary_text();
            std::fputs(text.c_str(), stdout);
            std::filesystem::create_directories(cfg.out_dir);
            mehler::write_file((std::filesystem::path(cfg.out_dir) / "summary.tsv").string(), text);
            return rep.all_pass() ? 0 : 1;
        }

        mehler::SimulateResult res = mehler::run_simulate(cfg, jobs);
        for (const std::string& f : res.files) std::printf("wrote %s\n", f.c_str());
        return 0;
    } catch (const mehler::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
