#include "illiq/foellmer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace illiq {

namespace {

void require_unit_start(double v, const char* what) {
    if (std::abs(v - 1.0) > 1e-12) {
        throw std::invalid_argument(std::string(what) + ": process must start at 1");
    }
}

}  // namespace

GeneralizedDensity density_from_q_deflator(const PathSet& z_paths, std::size_t comp) {
    GeneralizedDensity d;
    d.grid = z_paths.grid;
    d.n_paths = z_paths.n_paths;
    d.native = Measure::Q;
    const std::size_t nt = d.grid.size();
    d.z.resize(nt * d.n_paths);
    d.zcheck.resize(nt * d.n_paths);
    d.tau.tau_index.assign(d.n_paths, AbsorptionInfo::kNever);
    d.tau.tau_time.assign(d.n_paths, std::numeric_limits<double>::infinity());

    for (std::size_t p = 0; p < d.n_paths; ++p) {
        require_unit_start(z_paths.value(p, 0, comp), "density_from_q_deflator");
        for (std::size_t i = 0; i < nt; ++i) {
            const double z = z_paths.value(p, i, comp);
            if (!(z > 0.0)) {
                throw std::invalid_argument(
                    "density_from_q_deflator: deflator must stay strictly positive under Q");
            }
            d.z[i * d.n_paths + p] = z;
            d.zcheck[i * d.n_paths + p] = 1.0 / z;
        }
    }
    return d;
}

GeneralizedDensity density_from_qcheck_martingale(const PathSet& zcheck_paths,
                                                  const AbsorptionInfo& tau, std::size_t comp) {
    GeneralizedDensity d;
    d.grid = zcheck_paths.grid;
    d.n_paths = zcheck_paths.n_paths;
    d.native = Measure::Qcheck;
    d.tau = tau;
    const std::size_t nt = d.grid.size();
    d.z.resize(nt * d.n_paths);
    d.zcheck.resize(nt * d.n_paths);

    for (std::size_t p = 0; p < d.n_paths; ++p) {
        require_unit_start(zcheck_paths.value(p, 0, comp), "density_from_qcheck_martingale");
        for (std::size_t i = 0; i < nt; ++i) {
            const bool alive = tau.alive_at(p, i);
            const double zc = alive ? zcheck_paths.value(p, i, comp) : 0.0;
            d.zcheck[i * d.n_paths + p] = zc;
            d.z[i * d.n_paths + p] = (alive && zc > 0.0) ? 1.0 / zc : 0.0;
        }
    }
    return d;
}

MCEstimate expectation_under_Q(const GeneralizedDensity& d, double t, std::span<const double> h,
                               double ci_level) {
    if (d.native != Measure::Qcheck) {
        throw std::invalid_argument("expectation_under_Q: density must be sampled under Qcheck");
    }
    if (h.size() != d.n_paths) throw std::invalid_argument("expectation_under_Q: size mismatch");
    const std::size_t i = d.grid.index_of(t);
    std::vector<double> w(d.n_paths);
    for (std::size_t p = 0; p < d.n_paths; ++p) {
        const double zc = d.zcheck_at(p, i);
        w[p] = (zc > 0.0) ? zc * h[p] : 0.0;
    }
    return mc_mean(w, ci_level);
}

MCEstimate expectation_under_Qcheck_pre_tau(const GeneralizedDensity& d, double t,
                                            std::span<const double> h, double ci_level) {
    if (d.native != Measure::Q) {
        throw std::invalid_argument(
            "expectation_under_Qcheck_pre_tau: density must be sampled under Q");
    }
    if (h.size() != d.n_paths) {
        throw std::invalid_argument("expectation_under_Qcheck_pre_tau: size mismatch");
    }
    const std::size_t i = d.grid.index_of(t);
    std::vector<double> w(d.n_paths);
    for (std::size_t p = 0; p < d.n_paths; ++p) w[p] = d.z_at(p, i) * h[p];
    return mc_mean(w, ci_level);
}

MCEstimate explosion_cdf(const GeneralizedDensity& d, double T, double ci_level) {
    const std::size_t i = d.grid.index_of(T);
    std::vector<double> w(d.n_paths);
    if (d.native == Measure::Qcheck) {
        for (std::size_t p = 0; p < d.n_paths; ++p) {
            w[p] = d.tau.alive_at(p, i) ? 0.0 : 1.0;
        }
        return mc_mean(w, ci_level);
    }
    // Under Q: Qcheck[tau <= T] = 1 - E_Q[Z_T].
    for (std::size_t p = 0; p < d.n_paths; ++p) w[p] = 1.0 - d.z_at(p, i);
    return mc_mean(w, ci_level);
}

std::vector<double> bayes_conditional(const GeneralizedDensity& d, double t, double T,
                                      const NestedDeflatorSampler& sampler, std::size_t n_inner,
                                      std::uint64_t seed, std::span<const double> h_at_T) {
    if (t > T) throw std::invalid_argument("bayes_conditional: t must not exceed T");
    const std::size_t it = d.grid.index_of(t);
    const std::size_t iT = d.grid.index_of(T);
    std::vector<double> out(d.n_paths, 0.0);

    if (it == iT) {
        // Degenerate conditioning: H_T 1{tau > T}.
        if (h_at_T.size() != d.n_paths) {
            throw std::invalid_argument("bayes_conditional: t == T needs per-path H_T values");
        }
        for (std::size_t p = 0; p < d.n_paths; ++p) {
            out[p] = d.tau.alive_at(p, iT) ? h_at_T[p] : 0.0;
        }
        return out;
    }
    if (n_inner == 0) throw std::invalid_argument("bayes_conditional: n_inner must be >= 1");

    for (std::size_t p = 0; p < d.n_paths; ++p) {
        if (!d.tau.alive_at(p, it)) continue;  // indicator 1{tau > t}
        rng::PathStream gen(rng::mix64(seed ^ (0x9E37ull + p)), p);
        double acc = 0.0;
        for (std::size_t k = 0; k < n_inner; ++k) acc += sampler(p, gen);
        out[p] = acc / static_cast<double>(n_inner);
    }
    return out;
}

}  // namespace illiq
