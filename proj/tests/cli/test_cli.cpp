#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "emit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = TEST_WORK_DIR;

struct Run {
  int code;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const auto p = kWork / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

Run run(const std::string& args) {
  fs::create_directories(kWork);
  const auto err = kWork / "stderr.txt";
  const std::string cmd = std::string(BIPHOTON_CLI_PATH) + " " + args + " >" +
                          (kWork / "stdout.txt").string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

fs::path fresh_dir(const std::string& name) {
  const auto d = kWork / name;
  fs::remove_all(d);
  return d;
}

cli::Config parse(const std::string& text) {
  std::istringstream in(text);
  return cli::parse_config(in, "inline");
}

std::vector<std::string> header_of(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  return out;
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("unit suffixes convert to internal units") {
  using cli::Dim;
  CHECK(cli::convert_unit(35.0, "MHz", Dim::Frequency) == doctest::Approx(35.0 / 6.0));
  CHECK(cli::convert_unit(-2.0, "GHz", Dim::Frequency) == doctest::Approx(-2000.0 / 6.0));
  CHECK(cli::convert_unit(600.0, "kHz", Dim::Frequency) == doctest::Approx(0.1));
  CHECK(cli::convert_unit(0.05, "Gamma", Dim::Frequency) == 0.05);
  CHECK(cli::convert_unit(36.0, "MHz^2", Dim::FrequencySq) == doctest::Approx(1.0));
  CHECK(cli::convert_unit(1.5, "us", Dim::Time) == 1500.0);
  CHECK(cli::convert_unit(1.0, "1/Gamma", Dim::Time) == doctest::Approx(26.5258));
  CHECK(cli::convert_unit(3.0, "", Dim::Dimensionless) == 3.0);
  CHECK_THROWS_AS(cli::convert_unit(1.0, "ns", Dim::Frequency), cli::ConfigError);
  CHECK_THROWS_AS(cli::convert_unit(1.0, "MHz", Dim::Dimensionless), cli::ConfigError);
}

TEST_CASE("config lines, lists and comments") {
  const auto c = parse("# header\n\ngamma = 0.05 Gamma  # trailing\nomega_c_list = 2.5, 3.5, 30 MHz\n"
                       "gamma_axis = 0.01 Gamma, 60 kHz\nalpha_s = 350\nspectrum = fwm\n");
  CHECK(c.number("gamma", 0.0) == 0.05);
  CHECK(c.line("gamma") == 3);
  const auto l = c.list("omega_c_list");
  REQUIRE(l.size() == 3);
  CHECK(l[0] == doctest::Approx(2.5 / 6.0));  // trailing unit covers bare items
  CHECK(l[2] == doctest::Approx(5.0));
  CHECK(c.list("gamma_axis")[1] == doctest::Approx(0.01));
  CHECK(c.word("spectrum", "") == "fwm");
  CHECK(c.number("alpha_as", 7.0) == 7.0);
}

TEST_CASE("config diagnostics carry line and field") {
  auto message = [](const std::string& text) {
    try {
      cli::resolve(parse(text));
    } catch (const cli::ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("alpha_s = 350\ngamma = 0.05\n") ==
        "line 2, field 'gamma': missing unit, expected frequency (Gamma, kHz, MHz, GHz)");
  CHECK(message("gamma = 0.05 Gamma\ngamma = 0.06 Gamma\n").find("line 2, field 'gamma': duplicate") == 0);
  CHECK(message("\n\nfoo = 1\n") == "line 3, field 'foo': unknown key");
  CHECK(message("omega_c = abc Gamma\n").find("'abc' is not a number") != std::string::npos);
  CHECK(message("omega_c = 1, 2 Gamma\n").find("expects a single value") != std::string::npos);
  CHECK(message("no equals sign\n") == "line 1: expected 'key = value unit'");
  CHECK(message("gamma = -1 Gamma\n").find("line 1, field 'gamma'") == 0);
  CHECK(message("omega_c_list = 1, 2 Gamma\ngamma_list = 0.1 Gamma\n").find("line 2, field 'gamma_list'") == 0);
  CHECK(message("grid_span = 10 Gamma\n").find("given together") != std::string::npos);
  CHECK(message("sinc = maybe\n").find("expected true/false") != std::string::npos);
  CHECK(message("pathlength = sideways\n").find("line 1, field 'pathlength'") == 0);
}

TEST_CASE("zipped sweep and resolved config") {
  const auto rc = cli::resolve(parse("omega_c_list = 1, 2 Gamma\ngamma_list = 0.01, 0.02 Gamma\n"
                                     "filter_fwhm = 35 MHz\n"));
  REQUIRE(rc.sweep.size() == 2);
  CHECK(rc.sweep[1].omega_c == 2.0);
  CHECK(rc.sweep[1].gamma == 0.02);
  CHECK(rc.filter.fwhm == doctest::Approx(35.0 / 6.0));
  const auto j = rc.resolved();
  CHECK(j["sweep"].size() == 2);
  CHECK(j["entries"]["filter_fwhm"]["as_written"] == "35 MHz");
  CHECK(j["params"]["gamma_doppler"] == 54.0);
  CHECK(cli::resolve(parse("")).sweep.size() == 1);
}

TEST_CASE("numbers are written with 17 significant digits") {
  CHECK(cli::format_number(0.1) == "0.10000000000000001");
  CHECK(cli::format_number(1.0) == "1");
  CHECK(cli::format_number(std::nan("")) == "nan");
}

TEST_CASE("spectrum: three coupling values give three curve pairs") {
  const auto cfg = write_file("three_couplings.cfg",
                              "gamma = 0.05 Gamma\nalpha_s = 350\ngamma_doppler = 54 Gamma\n"
                              "omega_c_list = 2.5, 3.5, 5.0 Gamma\n");
  const auto out = fresh_dir("three_couplings");
  REQUIRE(run("spectrum -c " + cfg.string() + " -o " + out.string()).code == 0);
  for (int i = 0; i < 3; ++i) {
    const auto csv = out / ("spectrum_00" + std::to_string(i) + ".csv");
    CHECK(header_of(csv) == std::vector<std::string>{"delta_gamma_units", "value", "exact", "analytic"});
    const auto j = load_json(out / ("spectrum_00" + std::to_string(i) + ".json"));
    CHECK(j["config"]["entries"].contains("omega_c_list"));
    CHECK(j["summary"].contains("gamma_EIT"));
    CHECK(j["validity_metrics"].contains("x"));
    CHECK(j["params"]["omega_c"] == std::vector<double>{2.5, 3.5, 5.0}[i]);
  }
  CHECK_FALSE(fs::exists(out / "spectrum_003.csv"));
}

TEST_CASE("spectrum: no sweep gives one curve") {
  const auto cfg = write_file("single.cfg", "omega_c = 3 Gamma\ncompare = false\n");
  const auto out = fresh_dir("single");
  REQUIRE(run("spectrum -c " + cfg.string() + " -o " + out.string()).code == 0);
  CHECK(fs::exists(out / "spectrum_000.csv"));
  CHECK_FALSE(fs::exists(out / "spectrum_001.csv"));
  CHECK(header_of(out / "spectrum_000.csv") == std::vector<std::string>{"delta_gamma_units", "value"});
}

TEST_CASE("spectrum: fwm and biphoton kinds") {
  for (const std::string kind : {"fwm", "biphoton"}) {
    const auto cfg = write_file(kind + ".cfg", "spectrum = " + kind + "\nomega_c = 3.5 Gamma\n");
    const auto out = fresh_dir(kind);
    REQUIRE(run("spectrum -c " + cfg.string() + " -o " + out.string()).code == 0);
    const auto j = load_json(out / "spectrum_000.json");
    CHECK(j["kind"] == kind);
    CHECK(j["widths"]["numeric_fwhm"].get<double>() > 0.0);
  }
}

TEST_CASE("invalid gamma exits with status 2 naming the field") {
  const auto cfg = write_file("bad_gamma.cfg", "omega_c = 2 Gamma\ngamma = 0 Gamma\n");
  const auto r = run("spectrum -c " + cfg.string() + " -o " + fresh_dir("bad").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("'gamma'") != std::string::npos);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("exit statuses for i/o, numerical and usage errors") {
  const auto cfg = write_file("ok.cfg", "omega_c = 2 Gamma\n");
  CHECK(run("validate -c " + (kWork / "missing.cfg").string()).code == 4);
  const auto blocker = write_file("blocker", "not a directory");
  CHECK(run("spectrum -c " + cfg.string() + " -o " + (blocker / "sub").string()).code == 4);
  const auto flat = write_file("flat.csv", "tau_ns,g2\n0,1\n1,1\n2,1\n3,1\n4,1\n");
  CHECK(run("fit -c " + cfg.string() + " -i " + flat.string() + " -o " + fresh_dir("flat").string()).code == 3);
  CHECK(run("spectrum").code == 2);
  CHECK(run("spectrum -c " + cfg.string()).code == 2);  // no output directory
}

TEST_CASE("identical runs give byte-identical files") {
  const auto cfg = write_file("det.cfg", "omega_c_list = 2, 3 Gamma\nspectrum = biphoton\n");
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  REQUIRE(run("spectrum -c " + cfg.string() + " -o " + a.string()).code == 0);
  REQUIRE(run("spectrum -c " + cfg.string() + " -o " + b.string()).code == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
  CHECK(files == 4);
}

TEST_CASE("wavepacket: fitted decay next to the analytic one, exact bins") {
  const auto cfg = write_file("wp.cfg",
                              "alpha_s = 360\nomega_c = 1.75 Gamma\ngamma = 0.02 Gamma\n"
                              "time_bin = 0.5 ns\ntau_min = -10 ns\ntau_max = 1500 ns\n");
  const auto out = fresh_dir("wp");
  REQUIRE(run("wavepacket -c " + cfg.string() + " -o " + out.string()).code == 0);
  CHECK(header_of(out / "wavepacket_000.csv") ==
        std::vector<std::string>{"tau_ns", "g2_numeric", "g2_analytic"});
  const auto j = load_json(out / "wavepacket_000.json");
  const double tau = j["fit"]["tau_ns"], inv = j["analytic"]["inverse_gamma_BI_ns"];
  CHECK(std::abs(tau - inv) / inv < 0.10);
  CHECK(j["config"]["entries"]["time_bin"]["value"] == 0.5);

  const auto csv = cli::read_csv((out / "wavepacket_000.csv").string());
  const auto t = csv.column("tau_ns");
  REQUIRE(t.size() == 3021);
  CHECK(t.front() == -10.0);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(t[k] == -10.0 + 0.5 * static_cast<double>(k));
}

TEST_CASE("wavepacket: the 35 MHz filter barely moves the decay") {
  const std::string base = "alpha_s = 360\nomega_c = 1.75 Gamma\ngamma = 0.02 Gamma\n";
  const auto off = write_file("f_off.cfg", base);
  const auto on = write_file("f_on.cfg", base + "filter_fwhm = 35 MHz\n");
  const auto d0 = fresh_dir("f_off"), d1 = fresh_dir("f_on");
  REQUIRE(run("wavepacket -c " + off.string() + " -o " + d0.string()).code == 0);
  REQUIRE(run("wavepacket -c " + on.string() + " -o " + d1.string()).code == 0);
  const double t0 = load_json(d0 / "wavepacket_000.json")["fit"]["tau_ns"];
  const double t1 = load_json(d1 / "wavepacket_000.json")["fit"]["tau_ns"];
  CHECK(std::abs(t1 - t0) / t0 < 0.03);
  CHECK(load_json(d1 / "wavepacket_000.json")["config"]["filter"]["kind"] == "lorentzian_etalon");
}

TEST_CASE("ratios: the linewidth comparison gives nine curve files") {
  const auto cfg = write_file("ratios.cfg", "alpha_s_axis = 200, 350, 500\ngamma_axis = 0.01, 0.05, 0.1 Gamma\n"
                                            "omega_c_sq_axis = 1, 9, 25 Gamma^2\n");
  const auto out = fresh_dir("ratios");
  REQUIRE(run("ratios -c " + cfg.string() + " -o " + out.string()).code == 0);
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(out)) csvs += e.path().extension() == ".csv";
  CHECK(csvs == 9);
  const auto j = load_json(out / "ratios_004.json");
  CHECK(j["alpha_s"] == 350.0);
  CHECK(j["gamma"] == 0.05);
  CHECK(j["failed_points"] == 0);
  CHECK(cli::read_csv((out / "ratios_004.csv").string()).rows.size() == 3);
}

TEST_CASE("map: 8x8 grid, no failures where x <= 1") {
  const auto cfg = write_file("map.cfg", "map_kind = eit\n");
  const auto out = fresh_dir("map");
  REQUIRE(run("map -c " + cfg.string() + " -o " + out.string()).code == 0);
  const auto j = load_json(out / "map_eit.json");
  CHECK(j["omega_c_sq_axis"].size() == 8);
  CHECK(j["gamma_axis"].size() == 8);
  CHECK(j["failed_cells_x_le_1"] == 0);
  CHECK(cli::read_csv((out / "map_eit.csv").string()).rows.size() == 64);
  CHECK_FALSE(fs::exists(out / "map_fwm.csv"));
}

TEST_CASE("fit: synthetic wave packet round trip with provenance") {
  std::string text = "tau_ns,g2\n";
  for (int k = -50; k <= 3000; ++k) {
    const double t = k;
    const double v = t < 20.0 ? 0.01 : 0.01 + 0.8 * std::exp(-(t - 20.0) / 100.0);
    text += cli::format_number(t) + "," + cli::format_number(v) + "\n";
  }
  const auto data = write_file("synthetic.csv", text);
  const auto cfg = write_file("fit.cfg", "fit_kind = wavepacket\n");
  const auto out = fresh_dir("fit");
  REQUIRE(run("fit -c " + cfg.string() + " -i " + data.string() + " -o " + out.string()).code == 0);
  const auto j = load_json(out / "fit_000.json");
  CHECK(j["fit"]["tau_ns"].get<double>() == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(j["fit"]["t0_ns"].get<double>() == 20.0);
  CHECK(j["fit"]["y0"].get<double>() == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(j["input"]["path"] == data.string());
  CHECK(j["input"]["rows"] == 3051);
  CHECK(j["input"]["bytes"] == text.size());
  CHECK(j["value_column"] == "g2");
}

TEST_CASE("fit: schema errors name the column and row") {
  const auto cfg = write_file("fit2.cfg", "fit_kind = wavepacket\n");
  const auto bad = write_file("bad_rows.csv", "tau_ns,g2\n0,1\n1,oops\n");
  auto r = run("fit -c " + cfg.string() + " -i " + bad.string() + " -o " + fresh_dir("bad_fit").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("data row 2, column 'g2'") != std::string::npos);
  const auto nocol = write_file("no_col.csv", "time,g2\n0,1\n");
  r = run("fit -c " + cfg.string() + " -i " + nocol.string() + " -o " + fresh_dir("bad_fit").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("missing column 'tau_ns'") != std::string::npos);
  const auto ragged = write_file("ragged.csv", "tau_ns,g2\n0,1\n1\n");
  r = run("fit -c " + cfg.string() + " -i " + ragged.string() + " -o " + fresh_dir("bad_fit").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("fit: EIT spectra written by the spectrum command give back the coupling") {
  // Omega_c0 = 3 Gamma at power ratios 1 and 2, classical probe
  const auto gen = write_file("eit_gen.cfg", "pathlength = classical_probe_half\ncompare = false\n"
                                             "omega_c_list = 3, 4.242640687119285 Gamma\n"
                                             "gamma_list = 0.05, 0.05 Gamma\n");
  const auto data = fresh_dir("eit_data");
  REQUIRE(run("spectrum -c " + gen.string() + " -o " + data.string()).code == 0);
  const auto cfg = write_file("eit_fit.cfg", "fit_kind = eit\npower_ratios = 1, 2\n");
  const auto out = fresh_dir("eit_fit");
  REQUIRE(run("fit -c " + cfg.string() + " -i " + (data / "spectrum_000.csv").string() + " -i " +
              (data / "spectrum_001.csv").string() + " -o " + out.string())
              .code == 0);
  const auto j = load_json(out / "estimate.json");
  CHECK(j["omega_c0"].get<double>() == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(j["gamma_per_spectrum"][1].get<double>() == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(j["inputs"].size() == 2);
  CHECK(j["pathlength"] == "classical_probe_half");

  const auto wrong = write_file("eit_fit_bad.cfg", "fit_kind = eit\npower_ratios = 1\n");
  const auto r = run("fit -c " + wrong.string() + " -i " + (data / "spectrum_000.csv").string() + " -i " +
                     (data / "spectrum_001.csv").string() + " -o " + out.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("field 'power_ratios'") != std::string::npos);
}

TEST_CASE("validate prints the validity metrics") {
  const auto cfg = write_file("val.cfg", "omega_c_list = 1.75, 7 Gamma\ngamma_list = 0.02, 0.086 Gamma\n");
  REQUIRE(run("validate -c " + cfg.string()).code == 0);
  const auto j = json::parse(slurp(kWork / "stdout.txt"));
  REQUIRE(j["items"].size() == 2);
  CHECK(j["items"][0]["validity_metrics"]["x"].get<double>() ==
        doctest::Approx(1.75 * 1.75 / (4 * 0.02 * 54)));
  CHECK(j["items"][1]["validity_metrics"]["analytic_width_trusted"] == false);
}
