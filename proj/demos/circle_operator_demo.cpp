// Prints the weighted-l1 circle operator coefficients and the five
// smallest-magnitude eigenvalues of its FD discretization.
#include <cstdio>
#include <numbers>

#include "normlap/normlap.hpp"

int main() {
  using namespace normlap;
  const double w1 = 1.0, w2 = 1.5;
  std::printf("theta      first      second\n");
  for (int k = 1; k < 8; ++k) {
    const double th = k * std::numbers::pi / 16;
    std::printf("%.4f  %9.5f  %9.5f\n", th, circle_limit_operator(th, w1, w2, 1.0, 0.0),
                circle_limit_operator(th, w1, w2, 0.0, 1.0));
  }
  const FDEigenResult r = smallest_magnitude_eigs(assemble_circle_operator(w1, w2, 20000), 5);
  std::printf("\neigenvalues:");
  for (int i = 0; i < 5; ++i) std::printf(" %.6f", r.eigenvalues[i]);
  std::printf("\n");
}
