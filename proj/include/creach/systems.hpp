#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "creach/errors.hpp"

namespace creach {

enum class system_id { duffing, quadrotor, traffic, custom_test };

inline std::string to_string(system_id id) {
    switch (id) {
        case system_id::duffing: return "duffing";
        case system_id::quadrotor: return "quadrotor";
        case system_id::traffic: return "traffic";
        case system_id::custom_test: return "custom-test";
    }
    throw std::invalid_argument("to_string: unknown system id");
}

inline system_id system_id_from_string(const std::string& s) {
    if (s == "duffing") return system_id::duffing;
    if (s == "quadrotor") return system_id::quadrotor;
    if (s == "traffic") return system_id::traffic;
    if (s == "custom-test") return system_id::custom_test;
    throw config_error("unknown system id: '" + s + "'");
}

/// A benchmark system: fixed state/disturbance dimensions plus a named
/// parameter map initialized to the per-system defaults.
struct system_spec {
    system_id id;
    int state_dim;
    int disturbance_dim;
    std::map<std::string, double> parameters;

    double parameter(const std::string& name) const {
        auto it = parameters.find(name);
        if (it == parameters.end())
            throw config_error("system '" + to_string(id) + "' has no parameter '" + name + "'");
        return it->second;
    }
};

inline system_spec make_system(system_id id) {
    switch (id) {
        case system_id::duffing:
            return {id, 2, 0, {{"alpha", 0.05}, {"gamma", 0.4}, {"omega", 1.3}}};
        case system_id::quadrotor:
            return {id, 6, 2,
                    {{"g", 9.81}, {"K", 0.89 / 1.4}, {"d0", 70.0}, {"d1", 17.0}, {"n0", 55.0}}};
        case system_id::traffic:
            // c = v*w*xbar/(v+w) and beta = 1 are defaults, overridable.
            return {id, 6, 1,
                    {{"T", 30.0}, {"v", 0.5}, {"w", 1.0 / 6.0}, {"xbar", 320.0},
                     {"c", 40.0}, {"beta", 1.0}}};
        case system_id::custom_test:
            return {id, 1, 0, {{"rate", 1.0}}};
    }
    throw std::invalid_argument("make_system: unknown system id");
}

/// Step size used by the shipped configurations when none is given.
inline double default_step(system_id id) {
    switch (id) {
        case system_id::duffing: return 0.01;
        case system_id::quadrotor: return 0.005;
        case system_id::traffic: return 0.05;
        case system_id::custom_test: return 0.01;
    }
    throw std::invalid_argument("default_step: unknown system id");
}

/// Classical 4th-order Runge-Kutta, fixed step.
struct integrator_config {
    double step;
};

// -- vector fields ----------------------------------------------------------

struct duffing_params {
    double alpha, gamma, omega;
};

/// xdot = y, ydot = -alpha*y + x - x^3 + gamma*cos(omega*t)
inline void duffing_field(double t, std::span<const double> x, const duffing_params& p,
                          std::span<double> dxdt) {
    dxdt[0] = x[1];
    dxdt[1] = -p.alpha * x[1] + x[0] - x[0] * x[0] * x[0] + p.gamma * std::cos(p.omega * t);
}

struct quadrotor_params {
    double g, K, d0, d1, n0;
};

/// State (x, xdot, h, hdot, theta, thetadot); inputs (u1, u2) constant.
/// xddot = u1*K*sin(theta), hddot = -g + u1*K*cos(theta),
/// thetaddot = -d0*theta - d1*thetadot + n0*u2.
inline void quadrotor_field(double /*t*/, std::span<const double> x, std::span<const double> u,
                            const quadrotor_params& p, std::span<double> dxdt) {
    const double u1 = u[0];
    const double u2 = u[1];
    const double theta = x[4];
    dxdt[0] = x[1];
    dxdt[1] = u1 * p.K * std::sin(theta);
    dxdt[2] = x[3];
    dxdt[3] = -p.g + u1 * p.K * std::cos(theta);
    dxdt[4] = x[5];
    dxdt[5] = -p.d0 * theta - p.d1 * x[5] + p.n0 * u2;
}

struct traffic_params {
    double T, v, w, xbar, c, beta;
};

/// Six-segment cell transmission model; d is the (constant) influx into the
/// first segment. Flux between segments is limited by capacity c, free flow
/// v*x, and the congestion wave w*(xbar - x) of the receiving segment.
inline void traffic_field(double /*t*/, std::span<const double> x, double d,
                          const traffic_params& p, std::span<double> dxdt) {
    const double inv_T = 1.0 / p.T;
    dxdt[0] = inv_T * (d - std::min({p.c, p.v * x[0], p.w * (p.xbar - x[1])}));
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double inflow = std::min({p.c, p.v * x[i - 1], p.w * (p.xbar - x[i])});
        const double outflow = std::min({p.c, p.v * x[i], p.w * (p.xbar - x[i + 1])});
        dxdt[i] = inv_T * (inflow - outflow);
    }
    const std::size_t last = x.size() - 1;
    const double inflow_last =
        std::min({p.c, p.v * x[last - 1], p.w * (p.xbar - x[last]) / p.beta});
    dxdt[last] = inv_T * (inflow_last - std::min(p.c, p.v * x[last]));
}

// -- integration ------------------------------------------------------------

/// Fixed-step RK4 of a field f(t, state, dxdt) from t0 to t1, in place.
/// Per-step times are computed as t0 + i*step (never accumulated), and the
/// final step is shortened exactly to land on t1. Throws nonfinite_state if
/// any component stops being finite.
template <class Field>
void rk4_integrate(Field&& f, double t0, double t1, std::span<double> x, double step) {
    if (!(t1 >= t0)) throw std::invalid_argument("rk4_integrate: t1 must be >= t0");
    const double total = t1 - t0;
    if (total == 0.0) return;
    if (!(step > 0.0)) throw std::invalid_argument("rk4_integrate: step must be > 0");

    const double raw = total / step;
    std::uint64_t nsteps = raw <= 1.0 ? 1 : static_cast<std::uint64_t>(std::ceil(raw - 1e-9));

    const std::size_t n = x.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), xt(n);
    for (std::uint64_t i = 0; i < nsteps; ++i) {
        const double t = t0 + static_cast<double>(i) * step;
        const double h = (i + 1 == nsteps) ? (t1 - t) : step;
        const double h2 = h / 2.0;

        f(t, std::span<const double>(x), std::span<double>(k1));
        for (std::size_t j = 0; j < n; ++j) xt[j] = x[j] + h2 * k1[j];
        f(t + h2, std::span<const double>(xt), std::span<double>(k2));
        for (std::size_t j = 0; j < n; ++j) xt[j] = x[j] + h2 * k2[j];
        f(t + h2, std::span<const double>(xt), std::span<double>(k3));
        for (std::size_t j = 0; j < n; ++j) xt[j] = x[j] + h * k3[j];
        f(t + h, std::span<const double>(xt), std::span<double>(k4));
        for (std::size_t j = 0; j < n; ++j)
            x[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(x[j]))
                throw nonfinite_state("rk4_integrate: non-finite state at t=" +
                                      std::to_string(t + h));
    }
}

/// Endpoint map Phi(t1; t0, x0, d) under a constant-in-time disturbance d.
inline std::vector<double> simulate(const system_spec& spec, const integrator_config& integ,
                                    double t0, double t1, std::span<const double> x0,
                                    std::span<const double> d = {}) {
    if (x0.size() != static_cast<std::size_t>(spec.state_dim))
        throw dimension_mismatch("simulate: initial state has wrong dimension");
    if (d.size() != static_cast<std::size_t>(spec.disturbance_dim))
        throw dimension_mismatch("simulate: disturbance has wrong dimension");

    std::vector<double> x(x0.begin(), x0.end());
    switch (spec.id) {
        case system_id::duffing: {
            const duffing_params p{spec.parameter("alpha"), spec.parameter("gamma"),
                                   spec.parameter("omega")};
            rk4_integrate([&p](double t, std::span<const double> s,
                               std::span<double> out) { duffing_field(t, s, p, out); },
                          t0, t1, x, integ.step);
            break;
        }
        case system_id::quadrotor: {
            const quadrotor_params p{spec.parameter("g"), spec.parameter("K"),
                                     spec.parameter("d0"), spec.parameter("d1"),
                                     spec.parameter("n0")};
            rk4_integrate([&p, d](double t, std::span<const double> s,
                                  std::span<double> out) { quadrotor_field(t, s, d, p, out); },
                          t0, t1, x, integ.step);
            break;
        }
        case system_id::traffic: {
            const traffic_params p{spec.parameter("T"),    spec.parameter("v"),
                                   spec.parameter("w"),    spec.parameter("xbar"),
                                   spec.parameter("c"),    spec.parameter("beta")};
            const double influx = d[0];
            rk4_integrate([&p, influx](double t, std::span<const double> s,
                                       std::span<double> out) { traffic_field(t, s, influx, p, out); },
                          t0, t1, x, integ.step);
            break;
        }
        case system_id::custom_test: {
            const double rate = spec.parameter("rate");
            rk4_integrate([rate](double, std::span<const double> s,
                                 std::span<double> out) { out[0] = rate * s[0]; },
                          t0, t1, x, integ.step);
            break;
        }
    }
    return x;
}

/// Tight interval over-approximation for monotone dynamics: the endpoint
/// interval [Phi(x_lo, d_lo), Phi(x_hi, d_hi)]. Throws monotonicity_violated
/// if the result is not ordered, which signals misuse on a non-monotone
/// system.
struct state_interval {
    std::vector<double> lower;
    std::vector<double> upper;
};

inline state_interval monotone_interval(const system_spec& spec, const integrator_config& integ,
                                        double t0, double t1, std::span<const double> x_lo,
                                        std::span<const double> x_hi,
                                        std::span<const double> d_lo,
                                        std::span<const double> d_hi) {
    if (x_lo.size() != x_hi.size() || d_lo.size() != d_hi.size())
        throw dimension_mismatch("monotone_interval: bound dimensions disagree");
    for (std::size_t i = 0; i < x_lo.size(); ++i)
        if (!(x_lo[i] <= x_hi[i]))
            throw std::invalid_argument("monotone_interval: x_lo must be <= x_hi");
    for (std::size_t i = 0; i < d_lo.size(); ++i)
        if (!(d_lo[i] <= d_hi[i]))
            throw std::invalid_argument("monotone_interval: d_lo must be <= d_hi");

    state_interval out{simulate(spec, integ, t0, t1, x_lo, d_lo),
                       simulate(spec, integ, t0, t1, x_hi, d_hi)};
    for (std::size_t i = 0; i < out.lower.size(); ++i)
        if (!(out.lower[i] <= out.upper[i]))
            throw monotonicity_violated(
                "monotone_interval: endpoint interval inverted in component " +
                std::to_string(i + 1));
    return out;
}

} // namespace creach
