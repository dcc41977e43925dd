// Command-line front end: every subcommand reads one key=value config file
// and writes its artifact files (CSV/JSON) into the output directory.
//
//   ifsdim <command> --config FILE [--out DIR]
//
// Commands: pressure, aofs, dim, sweep, coverscan, cantor, localdim,
// validate.  Exit codes: 0 ok, 2 bad config/usage, 3 size cap, 4 numeric
// failure, 5 failed validation.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ifsdim/config.hpp"
#include "ifsdim/errors.hpp"

namespace {

const char* kCommands[] = {"pressure", "aofs",   "dim",      "sweep",
                           "coverscan", "cantor", "localdim", "validate"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical exponents of digit-product limsup sets"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  for (const char* name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value parameter file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "artifact directory (default: output.dir)");
  }

  try {
    app.parse(argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    const ifsdim::Config cfg = ifsdim::Config::load_file(config_path);
    return ifsdim::run_command(cfg, command, out_dir, std::cout);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : int(ifsdim::ExitCode::config);
  } catch (const ifsdim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return int(ifsdim::ExitCode::config);
  } catch (const ifsdim::SizeCapError& e) {
    std::cerr << "size cap: " << e.what() << '\n';
    return int(ifsdim::ExitCode::size_cap);
  } catch (const ifsdim::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return int(ifsdim::ExitCode::numeric);
  } catch (const ifsdim::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return int(ifsdim::ExitCode::validation);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return int(ifsdim::ExitCode::numeric);
  }
}
