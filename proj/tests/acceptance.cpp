#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "app/acceptance.hpp"

using namespace sglab::app;

int main(int argc, char** argv) {
  CLI::App app{"acceptance battery: one PASS/FAIL line per criterion"};
  AcceptanceOptions opt;
  bool verbose = false;
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--threads", opt.threads, "worker threads, 0 = all cores");
  app.add_option("--only", opt.only, "criterion ids to run")->check(CLI::Range(1, kCriteria));
  app.add_flag("-v,--verbose", verbose, "print every row");
  CLI11_PARSE(app, argc, argv);

  opt.on_done = [&](const Criterion& c) {
    std::printf("%s\n", format_line(c).c_str());
    if (verbose)
      for (const auto& r : c.rows)
        std::printf("    %-60s %+.6f se %.6f %s\n", r.quantity.c_str(), r.value, r.se,
                    r.pass ? (*r.pass ? "ok" : "FAIL") : "");
    std::fflush(stdout);
  };
  const auto all = run_acceptance(opt);
  int failed = 0;
  for (const auto& c : all) failed += c.pass ? 0 : 1;
  std::printf("%zu criteria, %d failed\n", all.size(), failed);
  return failed ? 1 : 0;
}
