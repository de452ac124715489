// Serial against OpenMP for tree enumeration and differential assembly.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "opw/bar_cobar.hpp"
#include "opw/chain_operads.hpp"
#include "opw/set_operads.hpp"

using namespace opw;

namespace {

double best_of(int reps, const std::function<void()>& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const std::string& name, double serial, double parallel, bool same) {
    std::printf("%-40s %10.4f %10.4f %8.2fx  %s\n", name.c_str(), serial, parallel, serial / parallel,
                same ? "same" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("threads: %d, best of %d\n", omp_get_max_threads(), reps);
    std::printf("%-40s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

    for (const auto& [name, p] : {std::pair{"ass", setop::make_ass()}, std::pair{"com", setop::make_com()}}) {
        const std::vector<int> marks{1, 2};
        for (int n = 4; n <= (std::string(name) == "ass" ? 5 : 6); ++n) {
            std::vector<trees::LabeledTree> a, b;
            const double s = best_of(reps, [&] { a = setop::enumerate_trees_serial(*p, marks, n, -1); });
            const double t = best_of(reps, [&] { b = setop::enumerate_trees(*p, marks, n, -1); });
            row(std::string("enumerate ") + name + " trees, 2 marks, n=" + std::to_string(n), s, t, a == b);
        }
    }

    for (const auto& [name, p] : {std::pair{"as_ns", chainop::make_as_ns()}, std::pair{"ass_sym", chainop::make_ass_sym()},
                                  std::pair{"com", chainop::make_com_chain()}}) {
        const int n = std::string(name) == "as_ns" ? 6 : 5;
        std::shared_ptr<chainop::TreeComplex> a, b;
        const double s = best_of(reps, [&] { a = chainop::w_pseudo(p, n, -1, false); });
        const double t = best_of(reps, [&] { b = chainop::w_pseudo(p, n, -1, true); });
        row(std::string("assemble W(") + name + ")(" + std::to_string(n) + ")", s, t,
            chain::complex_to_json(*a->complex()) == chain::complex_to_json(*b->complex()));
    }

    {
        const auto p = chainop::make_ass_sym();
        std::shared_ptr<chainop::TreeComplex> a, b;
        const double s = best_of(reps, [&] { a = barcobar::cobar(barcobar::bar(p, 4, -1, false), 4, -1, false); });
        const double t = best_of(reps, [&] { b = barcobar::cobar(barcobar::bar(p, 4, -1, true), 4, -1, true); });
        row("assemble bar and cobar(bar(ass_sym))(4)", s, t,
            chain::complex_to_json(*a->complex()) == chain::complex_to_json(*b->complex()));
    }
    return 0;
}
