#include <iostream>
#include <string>
#include <vector>

#include "run.hpp"

int main(int argc, char** argv) {
  using namespace dicke::cli;
  try {
    const auto config = parse_config(std::vector<std::string>(argv + 1, argv + argc));
    if (!config) return kOk;
    const RunReport report = run(*config, std::cerr);
    for (const auto& f : report.files) std::cout << f.string() << '\n';
    if (!report.converged) {
      std::cerr << "convergence check failed\n";
      return kConvergence;
    }
    return kOk;
  } catch (...) {
    return exit_code_for_current_exception(std::cerr);
  }
}
