#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace aoii::cli;
  CLI::App app{"AoII-optimal sampling policies for CTMC sources", "aoii"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "directory for output files");
    sub->add_option("--format", opts.format, "output format")->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_option("--seed", opts.seed, "simulation seed (overrides the config)");
    sub->add_option("--jobs", opts.jobs, "concurrent sweep points")->check(CLI::Range(1u, 1024u));
    sub->add_flag("--emit-plot-script", opts.emit_plot_script, "write a gnuplot script next to CSV output");
  };
  const std::pair<const char*, const char*> commands[] = {
      {"analyze", "evaluate an explicit policy"},
      {"optimize", "find the best policy of a family under the sampling budget"},
      {"simulate", "discrete-event simulation of an explicit policy"},
      {"sweep", "tabulate results over a parameter grid"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    sub->callback([&opts, name = std::string(name)] { opts.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    run(opts);
  } catch (const aoii::Error& e) {
    std::cerr << "aoii " << opts.command << ": " << aoii::to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "aoii " << opts.command << ": " << e.what() << '\n';
    return kNumericError;
  }
  return kOk;
}
