// Brute-force tensor quadrature of the SL(2) orbit-measure Fourier
// transform for v = (1, 0), u = (1, 1), written out in closed form.
// Prints T, re, im, modulus for the default sweep schedule, or for the
// single horizon given as the third argument.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <vector>

int main(int argc, char** argv) {
  const int n_angle = argc > 1 ? std::atoi(argv[1]) : 256;
  const double per_unit = argc > 2 ? std::atof(argv[2]) : 800.0;
  std::vector<double> schedule{5, 10, 20, 40, 80};
  if (argc > 3) schedule = {std::atof(argv[3])};
  for (double T : schedule) {
    const long n_t = static_cast<long>(std::ceil(per_unit * T));
    const double dt = T / static_cast<double>(n_t);
    long double re = 0.0L, im = 0.0L;
    for (int i = 0; i < n_angle; ++i) {
      const double a = 2.0 * std::numbers::pi * i / n_angle;
      const double ca = std::cos(a), sa = std::sin(a);
      for (int j = 0; j < n_angle; ++j) {
        const double b = 2.0 * std::numbers::pi * j / n_angle;
        const double cb = std::cos(b), sb = std::sin(b);
        double sr = 0.0, si = 0.0;
        for (long m = 0; m < n_t; ++m) {
          const double t = (m + 0.5) * dt;
          const double x = std::exp(t) * cb, y = std::exp(-t) * sb;
          const double phase = (ca * x - sa * y) + (sa * x + ca * y);
          sr += std::cos(phase);
          si += std::sin(phase);
        }
        re += sr;
        im += si;
      }
    }
    const double n = static_cast<double>(n_angle) * n_angle * static_cast<double>(n_t);
    const double r = static_cast<double>(re / n), s = static_cast<double>(im / n);
    std::printf("%.17g %.17g %.17g %.17g\n", T, r, s, std::hypot(r, s));
    std::fflush(stdout);
  }
}
