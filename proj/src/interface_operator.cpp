#include "slr/interface_operator.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>

namespace slr {

namespace {
int g_threads = 1;
}

void set_thread_count(int threads) { g_threads = threads < 1 ? 1 : threads; }
int thread_count() { return g_threads; }

void parallel_for_domains(index_t count, const std::function<void(index_t)>& fn) {
    const int workers = static_cast<int>(std::min<index_t>(g_threads, count));
    if (workers <= 1) {
        for (index_t d = 0; d < count; ++d) fn(d);
        return;
    }
    std::atomic<index_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (index_t d = next.fetch_add(1); d < count; d = next.fetch_add(1)) fn(d);
        });
    }
    for (auto& th : pool) th.join();
}

void InterfaceOperator::apply(std::span<const double> x, std::span<double> y) const {
    const index_t s = dim();
    if (static_cast<index_t>(x.size()) != s || static_cast<index_t>(y.size()) != s) {
        throw std::invalid_argument("interface operator: dimension mismatch");
    }
    // v = L^{-T} x (factor order of C handled inside the triangular solves)
    DenseVector v(s);
    c_factor->solve_lower_transpose(x, v);

    // per subdomain: u_d = B_d^{-1} (E_d v); accumulate g = sum E_d^T u_d
    DenseVector g(s, 0.0);
    std::vector<DenseVector> partial(dd->p);
    parallel_for_domains(dd->p, [&](index_t d) {
        const auto& E = dd->E[d];
        DenseVector t(E.rows), u(E.rows);
        E.matvec(v, t);
        (*b_factors)[d].solve(t, u);
        partial[d] = std::move(u);
    });
    for (index_t d = 0; d < dd->p; ++d) {
        dd->E[d].matvec_transpose_add(partial[d], g);   // fixed order, deterministic
    }
    c_factor->solve_lower(g, y);
}

}  // namespace slr
