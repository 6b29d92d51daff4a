// bohr_lab: orbit-measure sweeps, Van der Corput certificates, Weyl sums,
// KAK checks, the circle-pair example and unipotent orbits.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bohr/runner.hpp"

namespace {

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

bohr::Json load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read spec file " + path);
  bohr::Json j;
  try {
    j = bohr::Json::parse(in);
  } catch (const bohr::Json::parse_error& e) {
    throw std::runtime_error("spec file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("spec file must hold a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "command" && it.key() != "params" && it.key() != "format" && it.key() != "output")
      throw std::runtime_error("spec file: unknown top-level key '" + it.key() + "'");
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for Bohr density of linear group orbits"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();

  std::string spec_path, output, format;
  std::optional<int> workers;
  bool timings = false;
  app.add_option("--spec", spec_path, "JSON run spec; command-line flags override its params");
  app.add_option("-o,--output", output, "report path (default: stdout)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--workers", workers, "worker threads (overrides BOHR_LAB_WORKERS)");
  app.add_flag("--timings", timings, "add wall-clock timings to the JSON report");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, CLI::App*> subs;
  for (const std::string& cmd : bohr::commands()) {
    CLI::App* sub = app.add_subcommand(cmd);
    subs[cmd] = sub;
    for (const bohr::ParamInfo& p : bohr::command_params(cmd))
      sub->add_option(flag_name(p.key), values[cmd][p.key], p.help);
  }
  subs["sweep"]->description("Fourier transform of the orbit measures over a schedule of T");
  subs["vdc"]->description("Van der Corput certificate for a phase, or a random suite");
  subs["weyl"]->description("Weyl sums of j * alpha modulo a lattice");
  subs["kak"]->description("KAK reconstruction of random SL(n) elements");
  subs["remark1"]->description("Z u 2piZ mapped to the torus by (e^iv, e^2piiv)");
  subs["nilpotent"]->description("Unipotent orbit equidistribution in its affine hull");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    bohr::RunSpec spec;
    spec.command = app.get_subcommands().front()->get_name();
    CLI::App* sub = subs.at(spec.command);

    if (!spec_path.empty()) {
      const bohr::Json file = load_spec_file(spec_path);
      if (file.contains("command") && file["command"] != spec.command)
        throw std::runtime_error("spec file is for command " + file["command"].dump() + ", not " + spec.command);
      if (file.contains("params")) spec.params = file["params"];
      if (format.empty() && file.contains("format")) format = file["format"].get<std::string>();
      if (output.empty() && file.contains("output")) output = file["output"].get<std::string>();
    }
    if (!spec.params.is_object()) throw std::runtime_error("spec file params must be an object");
    for (const bohr::ParamInfo& p : bohr::command_params(spec.command))
      if (sub->get_option(flag_name(p.key))->count() > 0) {
        try {
          spec.params[p.key] = bohr::parse_param(p.kind, values[spec.command][p.key]);
        } catch (const std::invalid_argument& e) {
          throw std::invalid_argument(flag_name(p.key) + ": " + e.what());
        }
      }
    spec.format = format.empty() ? "json" : format;
    spec.workers = workers ? *workers : bohr::workers_from_env();
    spec.timings = timings;

    const bohr::RunResult result = bohr::run(spec);
    const std::string bytes = bohr::render(result, spec.format);
    if (output.empty())
      std::cout << bytes;
    else
      bohr::write_atomic(output, bytes);
    if (!result.message.empty()) std::cerr << "bohr_lab: " << result.message << "\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "bohr_lab: error: " << e.what() << "\n";
    return 1;
  }
}
