#include <CLI11.hpp>
#include <iostream>

#include "momrec/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"moment and constrained tensor recovery via semidefinite relaxations"};
  app.require_subcommand(1);

  std::string problem_path, result_path, out_path;
  momrec::cli::SolveFlags sflags;
  std::uint64_t seed = 0;
  double tol = 0.0;
  bool seed_set = false, tol_set = false;

  auto* solve = app.add_subcommand("solve", "solve a problem file");
  solve->add_option("file", problem_path, "problem JSON file")->required();
  solve->add_option("--order-min", sflags.order_min, "first relaxation order");
  solve->add_option("--order-max", sflags.order_max, "last relaxation order");
  solve->add_option("--seed", seed, "objective seed")->each([&](const std::string&) { seed_set = true; });
  solve->add_option("--tol", tol, "solver tolerance")->each([&](const std::string&) { tol_set = true; });
  solve->add_option("--out", sflags.out_path, "write the result JSON here");

  auto* verify = app.add_subcommand("verify", "re-check a result against its problem");
  double vtol = 1e-6;
  verify->add_option("result", result_path, "result JSON file")->required();
  verify->add_option("problem", problem_path, "problem JSON file")->required();
  verify->add_option("--tol", vtol, "residual tolerance (default 1e-6)");

  momrec::cli::BenchFlags bflags;
  auto* bench = app.add_subcommand("bench", "random-instance benchmark harness");
  bench->add_option("--n", bflags.n, "variables");
  bench->add_option("--d", bflags.d, "degree / tensor order");
  bench->add_option("--m", bflags.m, "number of measurements");
  bench->add_option("--trials", bflags.trials, "number of instances");
  bench->add_option("--mode", bflags.mode, "mrp | trp-general");
  bench->add_option("--seed", bflags.seed, "base seed");
  bench->add_option("--k-max", bflags.k_max, "relaxation order cap");
  bench->add_flag("--b-normal", bflags.b_normal,
                  "TRP mode: Gaussian right-hand sides instead of planted ones");

  int order = 0;
  auto* dump = app.add_subcommand("dump-sdp", "print the assembled conic program");
  dump->add_option("file", problem_path, "problem JSON file")->required();
  dump->add_option("--order", order, "relaxation order")->required();

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    if (seed_set) sflags.seed = seed;
    if (tol_set) sflags.tol = tol;
    return momrec::cli::cmd_solve(problem_path, sflags, std::cout, std::cerr);
  }
  if (verify->parsed())
    return momrec::cli::cmd_verify(result_path, problem_path, vtol, std::cout, std::cerr);
  if (bench->parsed()) return momrec::cli::cmd_bench(bflags, std::cout, std::cerr);
  if (dump->parsed()) return momrec::cli::cmd_dump(problem_path, order, std::cout, std::cerr);
  return 1;
}
