// Task-suite oracles: the analytic mixture eps against a numerical gradient
// of log q_k, dataset generation statistics, target scripting, point-agent
// kinematics, the detour expert's bimodality, and latency calibration.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "odp/envs.hpp"

using namespace odp;

namespace {

double rel_err(double ad, double fd) {
    return std::abs(ad - fd) / std::max({1.0, std::abs(ad), std::abs(fd)});
}

BanditSpec two_mode_spec(double sep = 0.6, double sigma = 0.2) {
    BanditSpec spec;
    spec.conditions = {Vec{0.0}};
    spec.mixtures = {{MixtureComponent{0.5, Vec{sep, sep}, sigma},
                      MixtureComponent{0.5, Vec{-sep, -sep}, sigma}}};
    return spec;
}

} // namespace

TEST_CASE("analytic eps equals -sigma times the numerical gradient of log q_k") {
    const BanditSpec spec = two_mode_spec();
    const NoiseSchedule dd = NoiseSchedule::ddpm_cosine();
    const NoiseSchedule ed = NoiseSchedule::edm();

    auto check_point = [&](const NoiseSchedule& s, double k_raw, Vec x) {
        const auto [alpha, sigma] = s.alpha_sigma(k_raw);
        const Vec e = analytic_bandit_eps(spec, 0, x, k_raw, s);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double h = 1e-5;
            const double xi = x[i];
            x[i] = xi + h;
            const double lp = bandit_log_qk(spec, 0, x, k_raw, s);
            x[i] = xi - h;
            const double lm = bandit_log_qk(spec, 0, x, k_raw, s);
            x[i] = xi;
            const double fd_score = (lp - lm) / (2.0 * h);
            CHECK(rel_err(e[i], -sigma * fd_score) <= 1e-6);
        }
    };

    check_point(dd, 50.0, {0.3, -0.1});
    check_point(dd, 5.0, {0.61, 0.55});
    check_point(dd, 95.0, {-1.2, 0.4});
    check_point(ed, 0.7, {0.2, 0.9});
    check_point(ed, 2.5, {-0.8, -0.3});
}

TEST_CASE("bandit dataset respects weights, counts and component moments") {
    const BanditSpec spec = two_mode_spec(0.6, 0.1);
    Rng rng(17);
    const auto pairs = gen_bandit_dataset(spec, 4000, rng);
    REQUIRE(pairs.size() == 4000);

    std::size_t plus = 0;
    double mean_plus = 0.0;
    for (const auto& p : pairs) {
        REQUIRE(p.chunk.size() == 2);
        if (p.chunk[0] + p.chunk[1] > 0.0) {
            ++plus;
            mean_plus += p.chunk[0];
        }
    }
    // equal weights: binomial(4000, 1/2) stays within 5 sigma of half
    CHECK(std::abs(double(plus) - 2000.0) < 5.0 * std::sqrt(1000.0));
    CHECK(mean_plus / double(plus) == doctest::Approx(0.6).epsilon(0.02));
}

TEST_CASE("bandit spec validation and condition lookup") {
    BanditSpec spec = two_mode_spec();
    spec.conditions = {Vec{-1.0}, Vec{1.0}};
    spec.mixtures.push_back(spec.mixtures[0]);
    spec.validate();
    CHECK(spec.condition_index(Vec{-0.8}) == 0);
    CHECK(spec.condition_index(Vec{2.0}) == 1);
    CHECK(spec.chunk_len() == 2);
    CHECK(spec.cond_dim() == 1);

    BanditSpec empty;
    CHECK_THROWS_AS(empty.validate(), ValidationError);

    BanditSpec bad = two_mode_spec();
    bad.mixtures[0][1].mean = {0.1}; // length clash with the first component
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    BanditSpec negw = two_mode_spec();
    negw.mixtures[0][0].weight = -1.0;
    CHECK_THROWS_AS(negw.validate(), ValidationError);
}

TEST_CASE("target script interpolates waypoints at constant speed and stops") {
    TargetScript sc;
    sc.waypoints = {Vec{0.0, 0.0}, Vec{3.0, 0.0}, Vec{3.0, 4.0}};
    sc.speed = 2.0;
    CHECK(sc.moving());
    CHECK(sc.position_at(0.0) == Vec{0.0, 0.0});
    CHECK(sc.position_at(1.0)[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sc.position_at(1.5) == Vec{3.0, 0.0});     // first corner, hit exactly
    CHECK(sc.position_at(2.5) == Vec{3.0, 2.0});     // climbing the second leg
    CHECK(sc.position_at(100.0) == Vec{3.0, 4.0});   // parked at the end

    TargetScript still;
    still.waypoints = {Vec{1.0, 1.0}};
    CHECK_FALSE(still.moving());
    CHECK(still.position_at(5.0) == Vec{1.0, 1.0});
}

TEST_CASE("reach kinematics: velocity clamp, capture, horizon") {
    Reach2DSpec spec;
    spec.script.waypoints = {Vec{1.0, 0.0}};
    spec.v_max = 1.0;
    spec.dt = 0.05;
    spec.horizon = 10;

    Reach2D env(spec);
    CHECK(env.state() == Vec{0.0, 0.0, 1.0, 0.0});

    // over-speed command is scaled onto the v_max circle
    env.step({3.0, 4.0});
    CHECK(env.agent()[0] == doctest::Approx(0.05 * 0.6).epsilon(1e-12));
    CHECK(env.agent()[1] == doctest::Approx(0.05 * 0.8).epsilon(1e-12));

    // running out of steps ends the episode without success
    Reach2D slow(spec);
    StepResult last{};
    for (int i = 0; i < 10; ++i) last = slow.step({0.0, 1e-3});
    CHECK(last.done);
    CHECK_FALSE(last.success);
    CHECK(slow.done());

    // stepping inside the capture radius succeeds immediately
    Reach2DSpec near = spec;
    near.script.waypoints = {Vec{0.1, 0.0}};
    Reach2D quick(near);
    const StepResult res = quick.step({1.0, 0.0});
    CHECK(res.done);
    CHECK(res.success);

    CHECK_THROWS_AS(quick.step(Vec{1.0}), DimensionError);
    Reach2D bad(spec);
    CHECK_THROWS_AS(bad.step(Vec{std::nan(""), 0.0}), ValidationError);
    CHECK_THROWS_AS(bad.advance_time(-1.0), ValidationError);
}

TEST_CASE("advance_time moves the scripted target but not the step clock") {
    Reach2DSpec spec;
    spec.script.waypoints = {Vec{1.0, 0.0}, Vec{5.0, 0.0}};
    spec.script.speed = 0.5;
    Reach2D env(spec);
    env.advance_time(2.0);
    CHECK(env.target() == Vec{2.0, 0.0});
    CHECK(env.steps_taken() == 0);
    CHECK(env.time() == doctest::Approx(2.0));

    env.reset();
    CHECK(env.target() == Vec{1.0, 0.0});
    CHECK(env.time() == 0.0);
}

TEST_CASE("scripted expert closes on a reachable static target") {
    Reach2DSpec spec;
    spec.script.waypoints = {Vec{1.3, -0.9}};
    Reach2D env(spec);
    Rng rng(3);
    const ScriptedExpert expert(spec, rng);
    CHECK(expert.detour_side() == 0);
    while (!env.done()) env.step(expert.action(env));
    CHECK(env.success());
}

TEST_CASE("obstacle detours pick both sides and still reach the target") {
    Reach2DSpec spec;
    spec.script.waypoints = {Vec{1.6, 0.0}};
    spec.horizon = 240;
    spec.has_obstacle = true;
    spec.obstacle_center = {0.8, 0.0};
    spec.obstacle_radius = 0.3;

    Rng rng(19);
    int left = 0, right = 0;
    double max_clearance_spread = 0.0;
    for (int i = 0; i < 200; ++i) {
        Reach2D env(spec);
        const ScriptedExpert expert(spec, rng);
        double min_y = 0.0, max_y = 0.0;
        while (!env.done()) {
            env.step(expert.action(env));
            min_y = std::min(min_y, env.agent()[1]);
            max_y = std::max(max_y, env.agent()[1]);
        }
        CHECK(env.success());
        (expert.detour_side() < 0 ? left : right) += 1;
        max_clearance_spread = std::max(max_clearance_spread, max_y - min_y);
    }
    // per-episode coin flip: both modes occur at least 35% of the time
    CHECK(left >= 70);
    CHECK(right >= 70);
    CHECK(left + right == 200);
    CHECK(max_clearance_spread > 0.1); // the detour actually leaves the direct line
}

TEST_CASE("latency model and calibration") {
    const LatencyModel lm{0.002, 0.01};
    CHECK(lm.latency(100) == doctest::Approx(0.21).epsilon(1e-12));
    CHECK(lm.latency(1) == doctest::Approx(0.012).epsilon(1e-12));

    Reach2DSpec spec;
    spec.script.waypoints = {Vec{0.65, 0.0}, Vec{8.0, 0.0}};
    spec.script.speed = 0.65;
    spec.capture_radius = 0.15;

    const double c = calibrate_latency(spec, 100, 1, 0.0);
    // the slow policy's plan goes stale past the capture radius...
    CHECK(spec.script.speed * c * 100.0 >= spec.capture_radius - 1e-9);
    // ...within a whisker of the smallest such cost
    CHECK(spec.script.speed * c * 100.0 <= spec.capture_radius * 1.001);
    // ...while the fast policy stays comfortably fresh
    CHECK(spec.script.speed * c * 1.0 < 0.5 * spec.capture_radius);

    Reach2DSpec still = spec;
    still.script.speed = 0.0;
    CHECK_THROWS_AS(calibrate_latency(still, 100, 1, 0.0), CalibrationError);
    CHECK_THROWS_AS(calibrate_latency(spec, 1, 1, 0.0), CalibrationError);
    // overhead alone already stalling the fast policy is a calibration failure
    CHECK_THROWS_AS(calibrate_latency(spec, 100, 1, 1.0), CalibrationError);
}
