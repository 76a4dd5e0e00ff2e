#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biphoton/errors.hpp"
#include "commands.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biphoton spectra and wave packets in a Doppler-broadened vapor"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::string> inputs;
  auto add_common = [&](CLI::App* sub, bool writes) {
    sub->add_option("-c,--config", config_path, "config file (key = value unit)")->required();
    if (writes) sub->add_option("-o,--out", out_dir, "output directory (overrides 'output')");
    return sub;
  };
  auto* spectrum = add_common(app.add_subcommand("spectrum", "EIT, FWM or biphoton spectra"), true);
  auto* wavepacket = add_common(app.add_subcommand("wavepacket", "G2 wave packets and decay fits"), true);
  auto* map = add_common(app.add_subcommand("map", "numeric vs analytic FWHM difference maps"), true);
  auto* ratios = add_common(app.add_subcommand("ratios", "linewidth ratio curves"), true);
  auto* fit = add_common(app.add_subcommand("fit", "fit wave packet or EIT data from CSV"), true);
  fit->add_option("-i,--input", inputs, "input CSV file(s)")->required();
  auto* validate = add_common(app.add_subcommand("validate", "print validity metrics"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  cli::Config raw;
  try {
    raw = cli::load_config(config_path);
    const auto rc = cli::resolve(raw);
    if (validate->parsed()) {
      cli::cmd_validate(rc, std::cout);
      return kOk;
    }
    std::string out = out_dir.empty() ? rc.raw.word("output", "") : out_dir;
    if (out.empty()) throw cli::ConfigError("no output directory: pass --out or set 'output'");
    if (rc.raw.word("format", "csv") != "csv") {
      throw cli::ConfigError(rc.raw.where("format") + "only csv is supported");
    }
    if (spectrum->parsed()) cli::cmd_spectrum(rc, out);
    if (wavepacket->parsed()) cli::cmd_wavepacket(rc, out);
    if (map->parsed()) cli::cmd_map(rc, out);
    if (ratios->parsed()) cli::cmd_ratios(rc, out);
    if (fit->parsed()) cli::cmd_fit(rc, inputs, out);
    return kOk;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const cli::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const biphoton::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const biphoton::DomainError& e) {
    try {
      cli::rethrow_with_line(raw, e);
    } catch (const cli::ConfigError& c) {
      std::cerr << "config error: " << c.what() << '\n';
    }
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
