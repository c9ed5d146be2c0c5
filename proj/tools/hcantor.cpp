#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hcantor/cli.hpp"

using hcantor::cli::Command;

int main(int argc, char** argv) {
  CLI::App app{"hyperbolic Cantor set toolkit"};
  app.require_subcommand(1);
  hcantor::cli::RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--system", cfg.system_path, "branch system JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.output_path, "report file (default stdout)");
    sub->add_option("--depth", cfg.depth, "depth for the command");
    sub->add_option("--grid", cfg.grid, "sample points per branch for derivative scans")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--seed", cfg.seed, "seed for sampled points");
    sub->add_option("--alpha", cfg.alpha, "Hoelder exponent override");
  };

  auto* build = app.add_subcommand("build", "enumerate blocks and gaps");
  common(build);
  build->add_option("--csv", cfg.csv_path, "blocks CSV at --depth");

  auto* gaps = app.add_subcommand("gaps", "gaps of one level as CSV");
  common(gaps);
  gaps->add_option("--level", cfg.level, "gap level");

  auto* dist = app.add_subcommand("distortion", "nonlinearity, class membership and distortion estimates");
  common(dist);
  dist->add_option("--delta", cfg.delta, "bounded distortion threshold");
  dist->add_option("--level-delta", cfg.level_delta, "delta of the gap-level bound");
  dist->add_option("--eps", cfg.eps, "nonlinearity bound of the class");
  dist->add_option("--M", cfg.M, "Hoelder constant bound of the class");

  auto* conj = app.add_subcommand("conjugate", "evaluate the conjugacy to the affine model");
  common(conj);
  conj->add_option("--points", cfg.points_path, "file with one x per line");
  conj->add_option("--samples", cfg.samples, "number of seeded sample points");
  conj->add_option("--csv", cfg.csv_path, "samples CSV");

  auto* ret = app.add_subcommand("return-analysis", "return maps and triples of a piecewise map");
  common(ret);
  ret->add_option("--map", cfg.map_path, "piecewise map JSON")->required()->check(CLI::ExistingFile);
  ret->add_option("--depth-r", cfg.depth_r, "deepest gap level searched");
  ret->add_option("--eta", cfg.eta, "nonlinearity budget for gap prediction");

  auto* self = app.add_subcommand("selfmaps", "affine self-maps of an affine system");
  common(self);
  self->add_option("--triple", cfg.triple, "i,j,[word],sign");
  self->add_option("--depth-a", cfg.depth_a, "oracle candidate gap level");

  auto* model = app.add_subcommand("model", "assemble the piecewise affine model map");
  common(model);
  model->add_option("--cover", cfg.cover_path, "cover JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << hcantor::cli::error_json(hcantor::ErrorKind::parse, e.what()).dump() << "\n";
    return hcantor::cli::exit_code(hcantor::ErrorKind::parse);
  }

  const std::string name = app.get_subcommands().front()->get_name();
  cfg.command = *hcantor::cli::command_from_string(name);
  return hcantor::cli::run(cfg, std::cout, std::cerr);
}
