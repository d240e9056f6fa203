// Serial vs OpenMP Monte Carlo, and single vs lock-step batched solves.
//   bench_monte_carlo [n_paths=200] [n_fine=16384] [workers=0]

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <omp.h>

#include "rsde/monte_carlo.hpp"
#include "rsde/reflect.hpp"
#include "rsde/stratonovich.hpp"

using namespace rsde;

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n_paths = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200;
    const std::size_t n_fine = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 16384;
    const int workers = argc > 3 ? std::atoi(argv[3]) : 0;

    const auto c = CoefficientSet::sine();
    const GridPtr grid = std::make_shared<const TimeGrid>(make_fine_grid(n_fine));
    const Partition pi = make_dyadic_partition(6, grid);

    const PathKernel kernel = [&](BrownianKey key, std::span<double> out) {
        const BrownianPath b = sample_brownian(key, grid);
        const ReflectedPath rp = solve_reflected(0.0, c, b);
        out[0] = riemann_sum(rp.sigma, pi, b).value - reference_integral(rp, b);
    };

    SampleMatrix serial(0, 0), parallel(0, 0);
    const double ts = seconds([&] { serial = mc_sample_serial(n_paths, 1, 1, kernel); });
    const double tp = seconds([&] { parallel = mc_sample(n_paths, 1, 1, kernel, workers); });
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    std::cout << "mc_sample: " << n_paths << " paths, n_fine " << n_fine << "\n"
              << "  serial   " << ts << " s\n"
              << "  openmp   " << tp << " s (" << threads << " threads), speedup " << ts / tp << "\n"
              << "  identical: " << (serial.data() == parallel.data() ? "yes" : "NO") << "\n";

    std::vector<double> x0s(81);
    for (std::size_t i = 0; i < x0s.size(); ++i) x0s[i] = static_cast<double>(i) / 16.0;
    const BrownianPath b = sample_brownian(BrownianKey{1, 0}, grid);
    std::vector<ReflectedPath> single;
    std::vector<ReflectedPath> batch;
    const double t1 = seconds([&] {
        for (double x : x0s) single.push_back(solve_reflected(x, c, b));
    });
    const double t2 = seconds([&] { batch = solve_reflected_batch(x0s, c, b); });
    bool same = true;
    for (std::size_t i = 0; i < x0s.size(); ++i) same = same && single[i].X == batch[i].X && single[i].L == batch[i].L;
    std::cout << "lattice solve (81 points):\n"
              << "  single   " << t1 << " s\n"
              << "  batch    " << t2 << " s, speedup " << t1 / t2 << "\n"
              << "  identical: " << (same ? "yes" : "NO") << "\n";
    return same && serial.data() == parallel.data() ? 0 : 1;
}
