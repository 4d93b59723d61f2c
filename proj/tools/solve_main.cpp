// Standalone DIMACS front end for the built-in solver, usable as --solver dimacs:<path>.
#include <iostream>

#include "hwassure/cnf.hpp"
#include "hwassure/solver.hpp"

int main(int argc, char** argv) {
  using namespace hwassure;
  if (argc != 2) {
    std::cerr << "usage: hwassure-solve <file.cnf>\n";
    return 2;
  }
  try {
    const auto formula = read_dimacs_file(argv[1]);
    CdclSolver solver;
    solver.add_formula(formula);
    switch (solver.solve()) {
      case SatStatus::Unsat:
        std::cout << "s UNSATISFIABLE\n";
        return 20;
      case SatStatus::Unknown:
        std::cout << "s UNKNOWN\n";
        return 0;
      case SatStatus::Sat:
        break;
    }
    std::cout << "s SATISFIABLE\nv";
    for (Lit v = 1; v <= formula.num_variables; ++v) std::cout << ' ' << (solver.model_value(v) ? v : -v);
    std::cout << " 0\n";
    return 10;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
