// sdfplan — inspection planning on learned truncated signed-distance fields.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric/training
// failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "sdfplan/runner.hpp"

namespace {

int dispatch(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const sdfplan::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sdfplan::TrainingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const sdfplan::DegenerateField& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const sdfplan::EmptyObservation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const sdfplan::Error& e) { // InvalidInput and other config-level misuse
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"inspection planning with learned TSDF environment models"};
    app.require_subcommand(1);

    std::string config_path, checkpoint_path, out_path;
    std::vector<std::string> overrides;
    double cell_size_override = 0.0;
    bool quick = false;

    auto* print_cfg = app.add_subcommand("print-default-config",
                                         "write the full default configuration as JSON");
    std::string print_out;
    print_cfg->add_option("--out", print_out, "path to write (default: stdout)");

    auto* train = app.add_subcommand("train-env", "train the global field from a mesh scene");
    train->add_option("--config", config_path, "JSON run configuration")->required();
    train->add_option("--set", overrides, "override config values (key.path=value)");

    auto* plan = app.add_subcommand("plan", "run the coverage planner against a checkpoint");
    plan->add_option("--config", config_path, "JSON run configuration")->required();
    plan->add_option("--checkpoint", checkpoint_path, "trained field checkpoint")->required();
    plan->add_option("--set", overrides, "override config values (key.path=value)");

    auto* exp = app.add_subcommand("export-isosurface", "export the field zero level set as PLY");
    exp->add_option("--checkpoint", checkpoint_path, "trained field checkpoint")->required();
    exp->add_option("--out", out_path, "output PLY path")->required();
    exp->add_option("--cell-size", cell_size_override, "override the extraction cell size");

    auto* verify = app.add_subcommand("verify", "run the oracle verification battery");
    verify->add_option("--checkpoint", checkpoint_path, "also validate this checkpoint");
    verify->add_flag("--quick", quick, "reduced sample counts");

    CLI11_PARSE(app, argc, argv);

    if (print_cfg->parsed()) {
        return dispatch([&] {
            const std::string dump = sdfplan::RunConfig::defaults().to_json().dump(2);
            if (print_out.empty()) {
                std::cout << dump << "\n";
            } else {
                std::ofstream out(print_out);
                if (!out) throw sdfplan::DataError("cannot write " + print_out);
                out << dump << "\n";
            }
        });
    }
    if (train->parsed()) {
        return dispatch([&] {
            const auto cfg = sdfplan::RunConfig::load(config_path, overrides);
            sdfplan::run_train_env(cfg, std::cout);
        });
    }
    if (plan->parsed()) {
        return dispatch([&] {
            const auto cfg = sdfplan::RunConfig::load(config_path, overrides);
            sdfplan::run_plan(cfg, checkpoint_path, std::cout);
        });
    }
    if (exp->parsed()) {
        return dispatch([&] {
            sdfplan::run_export_isosurface(checkpoint_path, out_path, cell_size_override,
                                           std::cout);
        });
    }
    if (verify->parsed()) {
        int code = dispatch([&] {
            const std::optional<std::string> ckpt =
                checkpoint_path.empty() ? std::nullopt
                                        : std::optional<std::string>(checkpoint_path);
            if (!sdfplan::run_verify(ckpt, quick, std::cout))
                throw sdfplan::TrainingError("verification battery failed");
        });
        return code;
    }
    return 0;
}
