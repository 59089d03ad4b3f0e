#include <doctest.h>

#include <cmath>
#include <random>

#include "dqsim/plant.hpp"
#include "test_support.hpp"

using namespace dqsim;

namespace {

// Exact trajectory oracle for the equal-inductance machine: the state matrix
// is -R/L * I + w * J, so the transition matrix is a decaying rotation,
//   x(t) = ss + e^{-R t / L} * [[cos wt, -sin wt], [sin wt, cos wt]] (x0 - ss).
PlantState exact_trajectory(const PlantState& x0, const Voltages& volts, double omega_e,
                            double t, const MotorParams& mp) {
    REQUIRE(mp.l_d_henry == mp.l_q_henry);
    const PlantState ss = steady_state(volts, omega_e, mp);
    const double decay = std::exp(-mp.r_ohm * t / mp.l_d_henry);
    const double c = std::cos(omega_e * t);
    const double s = std::sin(omega_e * t);
    const double dd = x0.i_d - ss.i_d;
    const double dq = x0.i_q - ss.i_q;
    return {ss.i_d + decay * (c * dd - s * dq), ss.i_q + decay * (s * dd + c * dq)};
}

PlantState simulate(PlantState x, const Voltages& v, double omega_e, double dt, int steps,
                    const MotorParams& mp) {
    for (int i = 0; i < steps; ++i) x = step(x, v, omega_e, dt, mp);
    return x;
}

constexpr double kOmegaE = 31.4159265358979324;  // 100 RPM at 3 pole pairs

}  // namespace

TEST_CASE("back_emf lands on the q axis") {
    const MotorParams mp = test::validation_motor();
    const Voltages zero = back_emf(0.0, mp);
    CHECK(zero.v_d == 0.0);
    CHECK(zero.v_q == 0.0);

    const Voltages e = back_emf(kOmegaE, mp);
    CHECK(e.v_d == 0.0);
    CHECK(e.v_q == doctest::Approx(kOmegaE * 0.0077).epsilon(1e-15));  // 0.24190 V

    const Voltages neg = back_emf(-kOmegaE, mp);
    CHECK(neg.v_q == doctest::Approx(-e.v_q));
}

TEST_CASE("derivative: zero everything stays zero") {
    const MotorParams mp = test::validation_motor();
    const PlantState d = derivative({0.0, 0.0}, {0.0, 0.0}, 0.0, mp);
    CHECK(d.i_d == 0.0);
    CHECK(d.i_q == 0.0);
}

TEST_CASE("derivative vanishes at the hand-computed steady point") {
    const MotorParams mp = test::validation_motor();
    // Forward arithmetic straight from the voltage equations at s = 0 for
    // state (0, 21.5): v_d = w L_q i_q, v_q = R i_q + w lam_m.
    const Voltages volts{kOmegaE * mp.l_q_henry * 21.5,
                         mp.r_ohm * 21.5 + kOmegaE * mp.lambda_m_weber};
    const PlantState d = derivative({0.0, 21.5}, volts, kOmegaE, mp);
    // Tolerance is relative to the natural rate scale v/L.
    const double rate_scale = std::abs(volts.v_q) / mp.l_q_henry;
    CHECK(std::abs(d.i_d) <= 1e-9 * rate_scale);
    CHECK(std::abs(d.i_q) <= 1e-9 * rate_scale);
}

TEST_CASE("derivative keeps the printed cross-coupling sign placement") {
    const MotorParams mp{1.0, 2.0, 3.0, 0.0, 1};
    // d row: (v_d - R i_d - w L_q i_q) / L_d with i_q = 1, w = 1: -L_q/L_d.
    const PlantState d = derivative({0.0, 1.0}, {0.0, 0.0}, 1.0, mp);
    CHECK(d.i_d == doctest::Approx(-3.0 / 2.0));
    // q row: (+ w L_d i_d) / L_q with i_d = 1: +L_d/L_q.
    const PlantState d2 = derivative({1.0, 0.0}, {0.0, 0.0}, 1.0, mp);
    CHECK(d2.i_q == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("steady_state: back-EMF voltages give zero current") {
    const MotorParams mp = test::validation_motor();
    for (const double w : {0.0, 10.0, kOmegaE, -55.0}) {
        const PlantState ss = steady_state(back_emf(w, mp), w, mp);
        CHECK(std::abs(ss.i_d) <= 1e-12);
        CHECK(std::abs(ss.i_q) <= 1e-12);
    }
}

TEST_CASE("steady_state inverts the forward voltage arithmetic") {
    const MotorParams mp = test::validation_motor();
    const Voltages volts{kOmegaE * mp.l_q_henry * 21.5,
                         mp.r_ohm * 21.5 + kOmegaE * mp.lambda_m_weber};
    const PlantState ss = steady_state(volts, kOmegaE, mp);
    CHECK(ss.i_d == doctest::Approx(0.0).scale(21.5).epsilon(1e-12));
    CHECK(ss.i_q == doctest::Approx(21.5).epsilon(1e-12));
}

TEST_CASE("steady_state decouples at zero speed") {
    const MotorParams mp = test::validation_motor();
    const PlantState ss = steady_state({0.5, -0.2}, 0.0, mp);
    CHECK(ss.i_d == doctest::Approx(0.5 / mp.r_ohm));
    CHECK(ss.i_q == doctest::Approx(-0.2 / mp.r_ohm));
}

TEST_CASE("steady_voltage and steady_state are mutual inverses") {
    const MotorParams mp = test::validation_motor();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const PlantState x{test::uniform(rng, -30.0, 30.0), test::uniform(rng, -30.0, 30.0)};
        const double w = test::uniform(rng, -200.0, 200.0);
        const PlantState back = steady_state(steady_voltage(x, w, mp), w, mp);
        CHECK(back.i_d == doctest::Approx(x.i_d).scale(30.0).epsilon(1e-12));
        CHECK(back.i_q == doctest::Approx(x.i_q).scale(30.0).epsilon(1e-12));
    }
}

TEST_CASE("step: dt = 0 is a no-op, bad dt rejected") {
    const MotorParams mp = test::validation_motor();
    const PlantState x{1.0, -2.0};
    const PlantState same = step(x, {0.1, 0.2}, 10.0, 0.0, mp);
    CHECK(same.i_d == x.i_d);
    CHECK(same.i_q == x.i_q);
    CHECK_THROWS_AS(step(x, {0.0, 0.0}, 0.0, -1e-6, mp), std::invalid_argument);
    CHECK_THROWS_AS(step(x, {0.0, 0.0}, 0.0, 1.01 * max_stable_dt(mp), mp),
                    std::invalid_argument);
    CHECK_NOTHROW(step(x, {0.0, 0.0}, 0.0, max_stable_dt(mp), mp));
}

TEST_CASE("step: free decay follows the RL time constant") {
    const MotorParams mp = test::validation_motor();
    const double tau = mp.l_d_henry / mp.r_ohm;  // 5.61 ms
    const double dt = 20e-6;
    PlantState x{1.0, 1.0};
    double prev_norm = std::hypot(x.i_d, x.i_q);
    const int steps_per_tau = static_cast<int>(tau / dt);
    for (int k = 0; k < 3; ++k) {
        x = simulate(x, {0.0, 0.0}, 0.0, dt, steps_per_tau, mp);
        const double norm = std::hypot(x.i_d, x.i_q);
        CHECK(norm == doctest::Approx(prev_norm * std::exp(-1.0)).epsilon(1e-2));
        CHECK(norm < prev_norm);
        prev_norm = norm;
    }
}

TEST_CASE("step converges to steady_state under constant inputs") {
    const MotorParams mp = test::validation_motor();
    const Voltages volts = steady_voltage({0.0, 21.5}, kOmegaE, mp);
    const double tau = mp.l_d_henry / mp.r_ohm;
    const double dt = 50e-6;

    // After 5 time constants the remaining gap is e^-5 of the initial one.
    PlantState x = simulate({0.0, 0.0}, volts, kOmegaE, dt,
                            static_cast<int>(5.0 * tau / dt), mp);
    const PlantState ss = steady_state(volts, kOmegaE, mp);
    const double gap5 = std::hypot(x.i_d - ss.i_d, x.i_q - ss.i_q);
    CHECK(gap5 / 21.5 < 1e-2);
    CHECK(gap5 / 21.5 == doctest::Approx(std::exp(-5.0)).epsilon(0.05));

    // Two more time constants put it beyond the 0.1% mark.
    x = simulate(x, volts, kOmegaE, dt, static_cast<int>(2.0 * tau / dt), mp);
    CHECK(std::hypot(x.i_d - ss.i_d, x.i_q - ss.i_q) / 21.5 < 1e-3);
}

TEST_CASE("back-EMF cancellation holds along the whole trajectory") {
    const MotorParams mp = test::validation_motor();
    const Voltages volts = back_emf(kOmegaE, mp);
    PlantState x{0.0, 0.0};
    for (int i = 0; i < 2000; ++i) {
        x = step(x, volts, kOmegaE, 100e-6, mp);
        CHECK(std::abs(x.i_d) <= 1e-12);
        CHECK(std::abs(x.i_q) <= 1e-12);
    }
}

TEST_CASE("derivative is affine: superposition of state and voltage deltas") {
    const MotorParams mp = test::validation_motor();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const PlantState xa{test::uniform(rng, -10, 10), test::uniform(rng, -10, 10)};
        const PlantState xb{test::uniform(rng, -10, 10), test::uniform(rng, -10, 10)};
        const Voltages va{test::uniform(rng, -1, 1), test::uniform(rng, -1, 1)};
        const Voltages vb{test::uniform(rng, -1, 1), test::uniform(rng, -1, 1)};
        const double w = 40.0;
        const PlantState da = derivative(xa, va, w, mp);
        const PlantState db = derivative(xb, vb, w, mp);
        const PlantState dz = derivative({0.0, 0.0}, {0.0, 0.0}, w, mp);
        const PlantState dsum = derivative({xa.i_d + xb.i_d, xa.i_q + xb.i_q},
                                           {va.v_d + vb.v_d, va.v_q + vb.v_q}, w, mp);
        // The EMF term makes the map affine, not linear: f(a+b) = f(a)+f(b)-f(0).
        CHECK(dsum.i_d ==
              doctest::Approx(da.i_d + db.i_d - dz.i_d).scale(1e5).epsilon(1e-12));
        CHECK(dsum.i_q ==
              doctest::Approx(da.i_q + db.i_q - dz.i_q).scale(1e5).epsilon(1e-12));
    }
}

TEST_CASE("step matches the exact transition matrix; halving dt shrinks error ~16x") {
    const MotorParams mp = test::validation_motor();
    const Voltages volts = steady_voltage({5.0, -12.0}, kOmegaE, mp);
    const PlantState x0{-2.0, 3.0};
    const double horizon = 2e-3;

    const auto rk4_error = [&](double dt) {
        const int steps = static_cast<int>(std::round(horizon / dt));
        const PlantState num = simulate(x0, volts, kOmegaE, dt, steps, mp);
        const PlantState ref = exact_trajectory(x0, volts, kOmegaE, horizon, mp);
        return std::hypot(num.i_d - ref.i_d, num.i_q - ref.i_q);
    };

    const double e1 = rk4_error(100e-6);
    const double e2 = rk4_error(50e-6);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.15));
    CHECK(e1 < 1e-4);
}

TEST_CASE("torque: sign, zero cases and the validation operating point") {
    const MotorParams mp = test::validation_motor();
    CHECK(torque({13.0, 0.0}, mp) == 0.0);
    // 1.5 * 3 * 0.0077 * 21.5 with L_d == L_q.
    CHECK(torque({0.0, 21.5}, mp) == doctest::Approx(1.5 * 3 * 0.0077 * 21.5).epsilon(1e-15));
    CHECK(torque({4.0, 21.5}, mp) == torque({0.0, 21.5}, mp));  // non-salient
    CHECK(torque({0.0, -21.5}, mp) < 0.0);

    const MotorParams salient{0.01, 100e-6, 250e-6, 0.005, 4};
    CHECK(torque({-10.0, 8.0}, salient) ==
          doctest::Approx(1.5 * 4 * (0.005 * 8.0 + (100e-6 - 250e-6) * -10.0 * 8.0)));
}
