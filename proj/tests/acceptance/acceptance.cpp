#include <cstdlib>
#include <iostream>
#include <string>

#include "getzler/verify.hpp"

// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
// Optional argument: a single criterion id.
int main(int argc, char** argv) {
  getzler::verify::Options opt;
  if (const char* jobs = std::getenv("GETZLER_JOBS")) opt.jobs = std::max(1, std::atoi(jobs));
  bool ok = true;
  auto report = [&](const getzler::verify::CriterionResult& r) {
    std::cout << getzler::verify::summary_line(r) << std::endl;
    ok = ok && r.passed;
  };
  if (argc > 1) {
    report(getzler::verify::run_criterion(std::stoi(argv[1]), opt));
  } else {
    getzler::verify::run_all(opt, report);
  }
  std::cout << (ok ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << std::endl;
  return ok ? 0 : 1;
}
