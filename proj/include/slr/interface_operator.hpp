/// @file interface_operator.hpp
/// @brief The symmetric interface map applied through block solves, without
///        forming it: x -> L^{-1} E^T B^{-1} E L^{-T} x on the s interface unknowns.

#ifndef SLR_INTERFACE_OPERATOR_HPP
#define SLR_INTERFACE_OPERATOR_HPP

#include <functional>
#include <memory>

#include "slr/decomposition.hpp"
#include "slr/incomplete_factor.hpp"

namespace slr {

/// Number of worker threads used for independent per-subdomain work.
/// 1 disables threading. Results are deterministic for any setting.
void set_thread_count(int threads);
int thread_count();

/// Runs fn(d) for d in [0, count); may use the configured worker threads.
void parallel_for_domains(index_t count, const std::function<void(index_t)>& fn);

struct InterfaceOperator {
    const DomainDecomposition* dd = nullptr;
    const std::vector<IncompleteFactor>* b_factors = nullptr;   // one per subdomain
    const IncompleteFactor* c_factor = nullptr;                 // ICT of C

    index_t dim() const { return dd ? dd->s : 0; }

    /// y = L^{-1} E^T B^{-1} E L^{-T} x; the B^{-1} is applied via the p
    /// independent subdomain factor solves.
    void apply(std::span<const double> x, std::span<double> y) const;
};

}  // namespace slr

#endif  // SLR_INTERFACE_OPERATOR_HPP
