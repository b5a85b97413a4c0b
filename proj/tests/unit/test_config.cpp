#include <doctest.h>

#include <sstream>
#include <string>

#include "swing/config.hpp"
#include "swing/error.hpp"

using namespace swing;

namespace {

const char* kMinimal =
    "n_dates = 3\n"
    "strike = 10\n"
    "q_max = 1\n"
    "Q_max = 2\n"
    "model = finite\n"
    "model.states = 0, 1\n"
    "model.transition = 0.5, 0.5; 0.25, 0.75\n"
    "model.initial = 1, 0\n"
    "model.spot = 9, 11\n";

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("minimal config keeps defaults") {
    const auto c = parse(kMinimal);
    CHECK(c.contract.n_dates == 3);
    CHECK(c.contract.discount == 1.0);
    CHECK(c.grid_density == 51);
    CHECK(c.training.restarts == 5);
    CHECK(c.discrete);
    CHECK(c.engine == EngineMode::lsmc);
    CHECK(c.forward_seed != c.seed);
    CHECK(c.training.seed == c.training_seed);
    const auto setup = finite_setup(c);
    CHECK(setup.model.size() == 2);
    CHECK(setup.model.transition(0)(1, 1) == 0.75);
}

TEST_CASE("errors name the field and the line") {
    const std::string bad_bounds = std::string(kMinimal) + "q_min = 2\n";
    const auto msg = error_of(bad_bounds);
    CHECK(msg.find("q_min") != std::string::npos);
    CHECK(msg.find("q_max") != std::string::npos);

    const auto unknown = error_of("n_dates = 3\nstrik = 10\n");
    CHECK(unknown.find("test.cfg:2") != std::string::npos);
    CHECK(unknown.find("strik") != std::string::npos);

    const auto dup = error_of(std::string(kMinimal) + "strike = 11\n");
    CHECK(dup.find("test.cfg:10") != std::string::npos);

    const auto number = error_of("n_dates = three\n");
    CHECK(number.find("test.cfg:1") != std::string::npos);

    const auto syntax = error_of("n_dates 3\n");
    CHECK(syntax.find("test.cfg:1") != std::string::npos);

    const auto seeds = error_of(std::string(kMinimal) + "seed = 5\nforward_seed = 5\n");
    CHECK(seeds.find("forward_seed") != std::string::npos);

    const auto oracle = error_of(
        "n_dates = 2\nq_max = 1\nQ_max = 1\nmodel = gaussian\nmodel.forward_curve = 1, 1\nengine = oracle\n");
    CHECK(oracle.find("oracle") != std::string::npos);
}

TEST_CASE("serialize and parse round-trip") {
    auto c = parse(std::string(kMinimal) + "discount = 0.9990000000000001\nengine = nn\nmlp.width = 7\n");
    c.experiment.mc_sizes = {10, 20, 40, 80};
    c.experiment.tail_slope_slack = 1.0 / 3.0;
    const std::string text = serialize_config(c);
    const auto back = parse(text);
    CHECK(back == c);
    CHECK(config_hash(back) == config_hash(c));

    auto moved = c;
    moved.out_dir = "elsewhere";
    moved.threads = 8;
    CHECK(config_hash(moved) == config_hash(c));
    moved.contract.strike += 1.0;
    CHECK(config_hash(moved) != config_hash(c));
}

TEST_CASE("reseed re-derives dependent seeds") {
    auto c = parse(kMinimal);
    const auto before = c;
    c.reseed(12345);
    CHECK(c.seed == 12345);
    CHECK(c.training_seed != before.training_seed);
    CHECK(c.forward_seed != c.seed);
    CHECK(c.training.seed == c.training_seed);
    auto d = parse(kMinimal);
    d.reseed(12345);
    CHECK(c == d);
}

TEST_CASE("gaussian config builds the model") {
    const auto c = parse(
        "n_dates = 3\nq_max = 1\nQ_max = 2\nmodel = gaussian\nmodel.forward_curve = 20, 21, 22\nmodel.vol = 0.3\n");
    const auto m = c.model.build();
    REQUIRE(std::holds_alternative<GaussianOneFactorModel>(m));
    CHECK(std::get<GaussianOneFactorModel>(m).vol == 0.3);
    CHECK_THROWS_AS(finite_setup(c), ConfigError);
    CHECK_THROWS_AS(parse("n_dates = 3\nq_max = 1\nQ_max = 2\nmodel = gaussian\nmodel.forward_curve = 20, 21\n"),
                    ConfigError);
}
