#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "hlift/error.hpp"

namespace {

using hlift::json;
namespace app = hlift::app;

int report_error(const std::string& code, const std::string& message, int exit_code,
                 const std::optional<std::filesystem::path>& out_dir) {
  const json record = {{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}};
  std::cerr << record.dump() << '\n';
  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir, ec);
    if (!ec) {
      try {
        hlift::write_json_file(*out_dir / "error.json", record);
      } catch (const std::exception&) {
        // stderr already has the record
      }
    }
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Height-based lifting toolkit: render, lift, robustness and bench experiments."};
  cli.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<bool> deterministic;

  cli.add_option("--config", config_path, "JSON experiment config")->required();
  cli.add_option("--seed", seed, "Master seed, overrides the config");
  cli.add_option("--out", out_dir, "Output directory, overrides the config");
  cli.add_option("--format", format, "Array export format")->check(CLI::IsMember({"csv", "json", "bin"}));
  cli.add_flag("--deterministic,!--no-deterministic", deterministic, "Fixed-order reductions (default on)");
  cli.fallthrough();

  auto* render = cli.add_subcommand("render", "Render depth/height maps and histograms");
  auto* lift = cli.add_subcommand("lift", "Lift a synthetic feature map and pool it to BEV");
  auto* robustness = cli.add_subcommand("robustness", "Extrinsic disturbance study");
  auto* bench = cli.add_subcommand("bench", "Time lift+pool for height vs depth bins");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("ConfigError", e.what(), 2, std::nullopt);
  }

  app::Overrides overrides;
  overrides.seed = seed;
  if (out_dir) overrides.out_dir = *out_dir;
  if (format) overrides.format = app::parse_format(*format);
  overrides.deterministic = deterministic;

  std::optional<std::filesystem::path> err_dir = overrides.out_dir;
  try {
    const app::ExperimentConfig cfg = app::load_config(config_path, overrides);
    err_dir = cfg.out_dir;
    if (render->parsed()) {
      app::cmd_render(cfg);
    } else if (lift->parsed()) {
      app::cmd_lift(cfg);
    } else if (robustness->parsed()) {
      app::cmd_robustness(cfg);
    } else if (bench->parsed()) {
      const auto r = app::cmd_bench(cfg);
      std::cout << "height " << r.height_ms << " ms, depth " << r.depth_ms << " ms, ratio " << r.ratio() << '\n';
    }
    std::cout << "wrote " << cfg.out_dir.string() << '\n';
  } catch (const hlift::Error& e) {
    const int code = hlift::is_config_error(e.code()) ? 2 : 3;
    return report_error(std::string(hlift::error_code_name(e.code())), e.what(), code, err_dir);
  } catch (const std::exception& e) {
    return report_error("RuntimeError", e.what(), 3, err_dir);
  }
  return 0;
}
