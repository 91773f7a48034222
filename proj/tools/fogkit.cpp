#include "fogkit/bench/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
    CLI::App app{"fogkit: synthetic fog, defogging and evaluation toolkit"};
    app.require_subcommand(1);

    struct Args {
        std::string config_file;
        std::vector<std::string> overrides;
    };
    std::map<std::string, Args> args;
    for (const auto& command : fogkit::commands()) {
        Args& a = args[command.name];
        CLI::App* sub = app.add_subcommand(command.name, command.summary);
        sub->add_option("--config", a.config_file, "key=value config file");
        sub->add_option("--set", a.overrides, "override one key, key=value (repeatable)");
        sub->footer("Config keys [default]:\n" + command.make_config().describe());
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fogkit::kExitConfig;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const fogkit::Command& command = fogkit::find_command(chosen->get_name());
    const Args& a = args[command.name];
    fogkit::RunConfig config = command.make_config();
    try {
        if (!a.config_file.empty()) config.load_file(a.config_file);
        for (const auto& o : a.overrides) config.set(o);
    } catch (const std::exception& e) {
        std::cerr << command.name << ": error: " << e.what() << "\n";
        return fogkit::exit_code(e);
    }
    return fogkit::run_command(command, config, std::cout, std::cerr);
}
