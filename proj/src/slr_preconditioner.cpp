#include "slr/slr_preconditioner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace slr {

namespace {

constexpr double kThetaCeil = 1.0 - 1e-10;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double clamp_unit(double v) { return std::min(std::max(v, 0.0), kThetaCeil); }

}  // namespace

InterfaceOperator SlrPreconditioner::interface_op() const {
    return InterfaceOperator{dd.get(), b_factors.get(), c_factor.get()};
}

void SlrPreconditioner::apply_schur_inverse(std::span<const double> g, std::span<double> y) const {
    const index_t s = dd->s;
    if (static_cast<index_t>(g.size()) != s || static_cast<index_t>(y.size()) != s) {
        throw std::invalid_argument("apply_schur_inverse: dimension mismatch");
    }
    if (s == 0) return;
    c_factor->solve(g, y);
    scal(correction.leading_scale, y);
    const index_t k = correction.Z.cols;
    for (index_t i = 0; i < k; ++i) {
        std::span<const double> zi(correction.Z.col(i), s);
        const double coef = correction.d[i] * dot(zi, g);
        axpy(coef, zi, y);
    }
}

DenseVector SlrPreconditioner::apply_schur_inverse(const DenseVector& g) const {
    DenseVector y(dd->s);
    apply_schur_inverse(std::span<const double>(g), std::span<double>(y));
    return y;
}

void SlrPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
    if (static_cast<index_t>(r.size()) != dd->n || static_cast<index_t>(z.size()) != dd->n) {
        throw std::invalid_argument("apply_preconditioner: dimension mismatch");
    }
    const index_t ni = dd->interior_total();
    const index_t s = dd->s;
    DenseVector rp(dd->n);
    permute_to_blocks(*dd, r, rp);
    std::span<const double> rf(rp.data(), ni);
    std::span<const double> rg(rp.data() + ni, s);

    // g' = r_g - E^T B^{-1} r_f   (first B solve)
    DenseVector gprime(rg.begin(), rg.end());
    std::vector<DenseVector> u1(dd->p);
    parallel_for_domains(dd->p, [&](index_t d) {
        const index_t off = dd->interior_start[d];
        const index_t m = dd->interior_size(d);
        DenseVector u(m);
        (*b_factors)[d].solve(rf.subspan(off, m), u);
        u1[d] = std::move(u);
    });
    for (index_t d = 0; d < dd->p; ++d) {
        for (index_t i = 0; i < dd->E[d].rows; ++i) {
            const double ui = u1[d][i];
            if (ui == 0.0) continue;
            for (index_t t = dd->E[d].row_ptr[i]; t < dd->E[d].row_ptr[i + 1]; ++t) {
                gprime[dd->E[d].col_idx[t]] -= dd->E[d].values[t] * ui;
            }
        }
    }

    DenseVector zp(dd->n);
    std::span<double> zf(zp.data(), ni);
    std::span<double> zg(zp.data() + ni, s);
    if (s > 0) {
        apply_schur_inverse(gprime, zg);
    }

    // u = B^{-1} (r_f - E y)   (second B solve)
    parallel_for_domains(dd->p, [&](index_t d) {
        const index_t off = dd->interior_start[d];
        const index_t m = dd->interior_size(d);
        DenseVector t(m);
        if (s > 0) {
            dd->E[d].matvec(zg, t);
            for (index_t i = 0; i < m; ++i) t[i] = rf[off + i] - t[i];
        } else {
            std::copy(rf.begin() + off, rf.begin() + off + m, t.begin());
        }
        (*b_factors)[d].solve(t, std::span<double>(zf.data() + off, m));
    });

    permute_from_blocks(*dd, zp, z);
}

DenseVector SlrPreconditioner::apply(const DenseVector& r) const {
    DenseVector z(dd->n);
    apply(std::span<const double>(r), std::span<double>(z));
    return z;
}

namespace {

// theta and the correction diagonal from the retained spectrum and policy.
void finish_correction(LowRankCorrection& c, const ThetaPolicy& policy, bool indefinite) {
    const index_t k = static_cast<index_t>(c.lambda.size());
    double theta_tail = 0.0;
    switch (policy.kind) {
        case ThetaPolicy::Kind::LambdaKPlus1: theta_tail = clamp_unit(c.lambda_kp1); break;
        case ThetaPolicy::Kind::LambdaS: theta_tail = clamp_unit(c.lambda_min); break;
        case ThetaPolicy::Kind::Fixed: theta_tail = clamp_unit(policy.value); break;
        case ThetaPolicy::Kind::Zero: theta_tail = 0.0; break;
        case ThetaPolicy::Kind::Grigori: theta_tail = 0.0; break;
    }
    c.theta = theta_tail;
    c.leading_scale = 1.0 / (1.0 - theta_tail);
    c.d.assign(k, 0.0);
    for (index_t i = 0; i < k; ++i) {
        double lam = c.lambda[i];
        if (!indefinite) {
            lam = clamp_unit(lam);
        } else if (std::abs(1.0 - lam) < 1e-10) {
            lam = kThetaCeil;   // keep the division finite
        }
        c.lambda[i] = lam;
        if (policy.kind == ThetaPolicy::Kind::Grigori) {
            const double eps = policy.value;
            if (eps <= 0.0) throw std::invalid_argument("theta policy: grigori epsilon must be > 0");
            c.d[i] = eps / (1.0 - lam) - c.leading_scale;
        } else {
            c.d[i] = 1.0 / (1.0 - lam) - c.leading_scale;
        }
    }
}

}  // namespace

SlrPreconditioner build_slr(const SymSparseMatrix& A, const SlrOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    PartitionLabels labels = partition_graph(A, opts.p);
    const double part_sec = seconds_since(t0);
    SlrPreconditioner P = build_slr(A, labels, opts);
    P.stats.partition_seconds = part_sec;
    return P;
}

SlrPreconditioner build_slr(const SymSparseMatrix& A, const PartitionLabels& labels,
                            const SlrOptions& opts) {
    if (opts.p != labels.p) {
        throw std::invalid_argument("build_slr: options p does not match labels");
    }
    const auto t0 = std::chrono::steady_clock::now();
    SlrPreconditioner P;
    P.options = opts;
    auto dd = std::make_shared<DomainDecomposition>(build_dd(A, labels));
    P.dd = dd;
    const index_t s = dd->s;
    if (s > 0 && opts.k >= s) {
        throw std::invalid_argument("build_slr: rank k must be < interface size");
    }

    // B factors (independent per subdomain)
    auto bf = std::make_shared<std::vector<IncompleteFactor>>(dd->p);
    FactorOptions bopts;
    bopts.droptol = opts.droptol_b;
    bopts.max_fill = opts.max_fill_b;
    parallel_for_domains(dd->p, [&](index_t d) {
        (*bf)[d] = opts.indefinite ? ildlt_factor(dd->B[d], bopts) : ict_factor(dd->B[d], bopts);
    });
    P.b_factors = bf;
    for (const auto& f : *bf) P.stats.b_perturbations += f.perturbations;

    // C factor: must be SPD; an exact-mode breakdown proves it is not.
    auto cf = std::make_shared<IncompleteFactor>();
    if (s > 0) {
        for (index_t i = 0; i < dd->C.n; ++i) {
            if (dd->C.lower_entry(i, i) <= 0.0) {
                throw std::runtime_error("build_slr: SPD interface required (nonpositive diagonal in C)");
            }
        }
        FactorOptions copts;
        copts.droptol = opts.droptol_c;
        copts.max_fill = opts.max_fill_c;
        copts.strict = true;
        try {
            *cf = ict_factor(dd->C, copts);
        } catch (const BreakdownError&) {
            if (opts.droptol_c == 0.0) {
                throw std::runtime_error("build_slr: SPD interface required (C factorization breakdown)");
            }
            copts.strict = false;   // dropping artifact; perturb and continue
            *cf = ict_factor(dd->C, copts);
        }
        P.stats.c_perturbations = cf->perturbations;
    }
    P.c_factor = cf;

    // dominant interface spectrum
    LowRankCorrection corr;
    const bool needs_spectrum =
        s > 0 && (opts.k > 0 || opts.theta.kind == ThetaPolicy::Kind::LambdaKPlus1 ||
                  opts.theta.kind == ThetaPolicy::Kind::LambdaS);
    if (needs_spectrum) {
        InterfaceOperator op{dd.get(), bf.get(), cf.get()};
        if (s == 1) {
            DenseVector e{1.0}, y(1);
            op.apply(e, y);
            corr.lambda_kp1 = corr.lambda_min = y[0];
        } else {
            LinearOperator lop{s, [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); }};
            const index_t k_req = std::max<index_t>(opts.k, 1);
            RitzSpectrum spec = lanczos_topk(lop, std::min<index_t>(k_req, s - 1), opts.lanczos);
            P.stats.lanczos_steps = spec.steps;
            const index_t k_keep = std::min<index_t>(opts.k, spec.vectors.cols);
            corr.lambda.assign(spec.values.begin(), spec.values.begin() + k_keep);
            corr.lambda_kp1 = static_cast<index_t>(spec.values.size()) > k_keep ? spec.values[k_keep]
                                                                                : spec.values.back();
            corr.lambda_min = spec.min_value;
            corr.uhat = DenseTallMatrix(s, k_keep);
            corr.Z = DenseTallMatrix(s, k_keep);
            for (index_t c = 0; c < k_keep; ++c) {
                std::copy(spec.vectors.col(c), spec.vectors.col(c) + s, corr.uhat.col(c));
                cf->solve_lower_transpose(std::span<const double>(spec.vectors.col(c), s),
                                          std::span<double>(corr.Z.col(c), s));
            }
        }
    }
    finish_correction(corr, opts.theta, opts.indefinite);
    P.correction = std::move(corr);

    // statistics
    P.stats.p = dd->p;
    P.stats.k = P.correction.Z.cols;
    P.stats.s = s;
    P.stats.theta = P.correction.theta;
    index_t pre_nnz = s > 0 ? cf->nnz() : 0;
    for (const auto& f : *bf) pre_nnz += f.nnz();
    pre_nnz += P.correction.Z.cols * (s + 1);
    P.stats.matrix_nnz = A.nnz_full();
    P.stats.fill_ratio = P.stats.matrix_nnz > 0 ? double(pre_nnz) / double(P.stats.matrix_nnz) : 0.0;
    P.stats.build_seconds = seconds_since(t0);
    return P;
}

SlrPreconditioner improve(const SlrPreconditioner& P, index_t k_extra) {
    if (k_extra == 0) return P;
    const index_t s = P.dd->s;
    const index_t k_old = P.correction.Z.cols;
    if (k_old + k_extra >= s) {
        throw std::invalid_argument("improve: grown rank must stay below interface size");
    }
    const auto t0 = std::chrono::steady_clock::now();
    SlrPreconditioner Q = P;
    InterfaceOperator op = P.interface_op();
    LinearOperator lop{s, [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); }};
    LanczosOptions lopts = P.options.lanczos;
    lopts.seed += 0x517cc1b727220a95ULL;   // fresh deterministic start direction
    RitzSpectrum extra = lanczos_topk(lop, k_extra, lopts, &P.correction.uhat);

    const index_t k_add = std::min<index_t>(k_extra, extra.vectors.cols);
    LowRankCorrection corr;
    const index_t k_new = k_old + k_add;
    corr.uhat = DenseTallMatrix(s, k_new);
    corr.Z = DenseTallMatrix(s, k_new);
    corr.lambda.resize(k_new);

    // merge descending (old values first at equal keys for determinism)
    std::vector<std::pair<double, std::pair<int, index_t>>> order;
    for (index_t i = 0; i < k_old; ++i) order.push_back({-P.correction.lambda[i], {0, i}});
    for (index_t i = 0; i < k_add; ++i) order.push_back({-extra.values[i], {1, i}});
    std::sort(order.begin(), order.end());
    for (index_t i = 0; i < k_new; ++i) {
        const auto [src, idx] = order[i].second;
        corr.lambda[i] = -order[i].first;
        const double* u = src == 0 ? P.correction.uhat.col(idx) : extra.vectors.col(idx);
        std::copy(u, u + s, corr.uhat.col(i));
        if (src == 0) {
            std::copy(P.correction.Z.col(idx), P.correction.Z.col(idx) + s, corr.Z.col(i));
        } else {
            P.c_factor->solve_lower_transpose(std::span<const double>(u, s),
                                              std::span<double>(corr.Z.col(i), s));
        }
    }
    corr.lambda_kp1 = static_cast<index_t>(extra.values.size()) > k_add ? extra.values[k_add]
                                                                        : extra.values.back();
    corr.lambda_min = std::min(P.correction.lambda_min, extra.min_value);
    finish_correction(corr, P.options.theta, P.options.indefinite);
    Q.correction = std::move(corr);
    Q.options.k = k_new;
    Q.stats.k = k_new;
    Q.stats.theta = Q.correction.theta;
    Q.stats.lanczos_steps += extra.steps;
    if (Q.stats.matrix_nnz > 0) {
        Q.stats.fill_ratio += double(k_add * (s + 1)) / double(Q.stats.matrix_nnz);
    }
    Q.stats.build_seconds += seconds_since(t0);
    return Q;
}

index_t required_rank(const RitzSpectrum& spectrum, double K) {
    if (K <= 1.0) throw std::invalid_argument("required_rank: K must be > 1");
    const double thr = 1.0 - 1.0 / K;
    for (index_t k = 0; k < static_cast<index_t>(spectrum.values.size()); ++k) {
        if (spectrum.values[k] <= thr) return k;
    }
    throw std::runtime_error("required_rank: insufficient spectrum");
}

index_t certify_rank(const InterfaceOperator& op, double K, index_t cap, const LanczosOptions& lopts) {
    const index_t s = op.dim();
    LinearOperator lop{s, [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); }};
    index_t k_try = 8;
    for (;;) {
        k_try = std::min<index_t>(k_try, std::min<index_t>(cap, s - 1));
        RitzSpectrum spec = lanczos_topk(lop, k_try, lopts);
        try {
            const index_t r = required_rank(spec, K);
            if (r < k_try || k_try == std::min<index_t>(cap, s - 1)) return r;
        } catch (const std::runtime_error&) {
            if (k_try >= std::min<index_t>(cap, s - 1)) throw;
        }
        k_try *= 2;
    }
}

std::string stats_csv_row(const SlrBuildStats& st, bool with_times) {
    char buf[160];
    if (with_times) {
        std::snprintf(buf, sizeof buf, "%.3f,%.3f,%lld,%lld", st.fill_ratio, st.build_seconds,
                      static_cast<long long>(st.p), static_cast<long long>(st.k));
    } else {
        std::snprintf(buf, sizeof buf, "%.3f,-,%lld,%lld", st.fill_ratio,
                      static_cast<long long>(st.p), static_cast<long long>(st.k));
    }
    return buf;
}

}  // namespace slr
