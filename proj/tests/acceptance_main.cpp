// One PASS/FAIL line per acceptance criterion. With --criterion K only that
// criterion runs; the exit status is non-zero if any criterion that ran failed.

#include <cstdlib>
#include <iostream>
#include <string>

#include "manin/acceptance.hpp"

int main(int argc, char** argv) {
  int only = 0;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--criterion" && k + 1 < argc) {
      only = std::atoi(argv[++k]);
    } else {
      std::cerr << "usage: acceptance [--criterion K]\n";
      return 2;
    }
  }
  bool all = true;
  bool ran = false;
  for (const auto& e : manin::acceptance::registry()) {
    if (only && e.id != only) continue;
    const auto r = manin::acceptance::run(e);
    std::cout << manin::acceptance::format_line(r) << std::endl;
    all = all && r.passed;
    ran = true;
  }
  if (!ran) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  return all ? 0 : 1;
}
