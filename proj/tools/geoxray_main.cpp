#include <CLI11.hpp>

#include <iostream>

#include "geoxray/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"geoxray: attenuated geodesic X-ray transform on a conformal disk"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat JSON run configuration");
    sub->add_option("--set", overrides, "key=value override (repeatable)");
  };
  auto* phantom = app.add_subcommand("phantom", "write phantom, attenuation and sound speed fields");
  auto* forward = app.add_subcommand("forward", "simulate attenuated ray data");
  auto* invert = app.add_subcommand("invert", "reconstruct from data");
  auto* selftest = app.add_subcommand("selftest", "run reduced invariant suites");
  for (auto* s : {phantom, forward, invert, selftest}) add_common(s);

  CLI11_PARSE(app, argc, argv);

  try {
    geoxray::RunConfig cfg = config_path.empty() ? geoxray::RunConfig{} : geoxray::RunConfig::load(config_path);
    for (const auto& kv : overrides) cfg.set(kv);
    cfg.validate();
    if (phantom->parsed()) return geoxray::cmd_phantom(cfg, std::cout);
    if (forward->parsed()) return geoxray::cmd_forward(cfg, std::cout);
    if (invert->parsed()) return geoxray::cmd_invert(cfg, std::cout);
    return geoxray::cmd_selftest(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "geoxray: " << e.what() << '\n';
    return geoxray::kExitError;
  }
}
