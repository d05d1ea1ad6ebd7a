#include <cstdlib>
#include <iostream>
#include <string>

#include "mtl/reproduce.hpp"

// Usage: acceptance [--criterion N]. Prints one verdict line per criterion
// followed by its rows; exits nonzero when any criterion fails.
int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }
  bool ok = true;
  for (int n = 1; n <= mtl::acceptance::kCriteria; ++n) {
    if (only && n != only) continue;
    const mtl::CheckReport rep = mtl::acceptance::criterion(n, std::cerr);
    std::cout << "criterion " << n << ": " << (rep.passed() ? "PASS" : "FAIL") << "\n";
    mtl::print_report(std::cout, rep);
    std::cout.flush();
    ok &= rep.passed();
  }
  return ok ? 0 : 1;
}
