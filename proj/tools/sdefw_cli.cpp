// Command-line front end. Talks to the library through the C interface only.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "sdefw/sdefw.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { sdefw_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

int report(sdefw_status status) {
  std::cerr << "sdefw: " << sdefw_status_name(status) << " error: " << sdefw_last_error() << "\n";
  return status == SDEFW_E_USAGE || status == SDEFW_E_PARAMETER ? kExitUsage : kExitFail;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

struct RunArgs {
  std::string config;
  std::vector<std::string> overrides;
  int workers = 1;
  std::string out;
  std::string plot;
};

int run_command(const RunArgs& args) {
  sdefw_config* raw = nullptr;
  if (auto s = sdefw_config_load(args.config.c_str(), &raw); s != SDEFW_OK) {
    return s == SDEFW_E_IO ? report(SDEFW_E_USAGE) : report(s);
  }
  std::unique_ptr<sdefw_config, decltype(&sdefw_config_free)> config(raw, sdefw_config_free);
  for (const auto& o : args.overrides) {
    if (auto s = sdefw_config_set(config.get(), o.c_str()); s != SDEFW_OK) return report(s);
  }

  sdefw_study* raw_study = nullptr;
  if (auto s = sdefw_run_study(config.get(), args.workers, &raw_study); s != SDEFW_OK) return report(s);
  std::unique_ptr<sdefw_study, decltype(&sdefw_study_free)> study(raw_study, sdefw_study_free);

  OwnedString csv, summary, configured_out;
  if (auto s = sdefw_study_csv(study.get(), &csv.p); s != SDEFW_OK) return report(s);
  if (auto s = sdefw_study_summary(study.get(), &summary.p); s != SDEFW_OK) return report(s);
  if (auto s = sdefw_config_output(config.get(), &configured_out.p); s != SDEFW_OK) return report(s);

  const std::string out_path = args.out.empty() ? configured_out.str() : args.out;
  if (out_path.empty()) {
    std::cout << csv.str();
  } else if (!write_file(out_path, csv.str())) {
    std::cerr << "sdefw: cannot write " << out_path << "\n";
    return kExitFail;
  }
  std::cerr << summary.str();

  if (!args.plot.empty()) {
    OwnedString plot, warnings;
    if (auto s = sdefw_study_plotdata(study.get(), &plot.p, &warnings.p); s != SDEFW_OK) return report(s);
    std::cerr << warnings.str();
    if (!write_file(args.plot, plot.str())) {
      std::cerr << "sdefw: cannot write " << args.plot << "\n";
      return kExitFail;
    }
  }
  return sdefw_study_all_pass(study.get()) ? kExitPass : kExitFail;
}

int verify_command(int m, int d, int degree) {
  OwnedString text;
  int pass = 0;
  if (auto s = sdefw_verify_algebra(m, d, degree, &text.p, &pass); s != SDEFW_OK) return report(s);
  std::cout << text.str();
  std::cout << (pass ? "RESULT PASS\n" : "RESULT FAIL\n");
  return pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extrapolated splitting schemes for weak SDE approximation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sdefw_version()));

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a convergence study from a config file");
  run->add_option("config", run_args.config, "Config file")->required();
  run->add_option("--set", run_args.overrides, "Override a config key (key=value)")->take_all()->allow_extra_args(false);
  run->add_option("--workers", run_args.workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", run_args.out, "CSV output path (default: config output, else stdout)");
  run->add_option("--plot", run_args.plot, "Write log10(n) log10(error) series to this path");

  int m = 0, d = 0, degree = 0;
  auto* verify = app.add_subcommand("verify-algebra", "Exact order-condition checks");
  verify->add_option("--m", m, "Number of extrapolation levels")->required();
  verify->add_option("--d", d, "Noise dimension")->required();
  verify->add_option("--degree", degree, "Truncation degree (default 2m)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (run->parsed()) return run_command(run_args);
  return verify_command(m, d, degree);
}
