#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "layerwave/amplitude.hpp"
#include "layerwave/error.hpp"
#include "layerwave/forward.hpp"
#include "layerwave/generate.hpp"
#include "layerwave/oracle.hpp"

using namespace layerwave;
using testing::Q;
using testing::Qs;

namespace {

ScatteringSequence seq(std::vector<int> path) { return ScatteringSequence{std::move(path)}; }

std::vector<TransitCountVector> members_up_to(std::size_t size, Count max_total) {
    std::vector<TransitCountVector> out;
    for (Count total = 1; total <= max_total; ++total) testing::members_of_total(size, total, out);
    return out;
}

// C(k, b) C(shift(k) - u, b - u) with u_n = min(1, shift(k)_n), written out
// with plain factorial-free binomials.
std::uint64_t product_formula(const TransitCountVector& k, const TransitCountVector& b) {
    auto choose = [](Count n, Count r) -> std::uint64_t {
        if (r < 0 || r > n) return 0;
        std::uint64_t out = 1;
        for (Count i = 1; i <= r; ++i) out = out * static_cast<std::uint64_t>(n - r + i) / static_cast<std::uint64_t>(i);
        return out;
    };
    std::uint64_t out = 1;
    for (std::size_t n = 0; n < k.size(); ++n) {
        const Count shift = n + 1 < k.size() ? k[n + 1] : 0;
        const Count u = std::min<Count>(1, shift);
        out *= choose(k[n], b[n]) * choose(shift - u, b[n] - u);
    }
    return out;
}

}  // namespace

TEST_SUITE("oracle") {
    TEST_CASE("sequence enumeration for one layer") {
        const std::vector<Rational> tau = Qs({"1", "1"});
        CHECK(enumerate_sequences(1, tau, Q("1")) == std::vector<ScatteringSequence>{seq({-1, 0, -1})});
        CHECK(enumerate_sequences(1, tau, Q("2")) ==
              std::vector<ScatteringSequence>{seq({-1, 0, -1}), seq({-1, 0, 1, 0, -1})});
        const auto three = enumerate_sequences(1, tau, Q("3"));
        CHECK(three.size() == 3);
        CHECK(std::find(three.begin(), three.end(), seq({-1, 0, 1, 0, 1, 0, -1})) != three.end());
        CHECK(std::is_sorted(three.begin(), three.end()));
    }

    TEST_CASE("sequence guard") {
        CHECK_THROWS_AS(enumerate_sequences(2, std::vector<double>{1.0, 0.1, 0.1}, 3.0, OracleLimits{50}), GuardError);
    }

    TEST_CASE("stats and weights of the first sequences") {
        const auto refl = Qs({"1/2", "7/10"});

        auto s = stats(seq({-1, 0, -1}), 1);
        CHECK(s.kappa == TransitCountVector{1, 0});
        CHECK(s.beta == TransitCountVector{0, 0});
        CHECK(weight_eval(s, refl) == Q("1/2"));

        s = stats(seq({-1, 0, 1, 0, -1}), 1);
        CHECK(s.kappa == TransitCountVector{1, 1});
        CHECK(s.beta == TransitCountVector{1, 0});
        CHECK(weight_eval(s, refl) == Q("21/40"));

        s = stats(seq({-1, 0, 1, 0, 1, 0, -1}), 1);
        CHECK(s.kappa == TransitCountVector{1, 2});
        CHECK(s.beta == TransitCountVector{1, 0});
        CHECK(s.reflections_below == TransitCountVector{1, 0});
        CHECK(s.reflections_above == TransitCountVector{0, 2});
        CHECK(weight_eval(s, refl) == Q("-147/800"));
        CHECK(testing::close(weight_eval(s, std::vector<double>{0.5, 0.7}), -0.18375));
        CHECK(stepwise_weight(s, refl) == Q("-147/800"));
    }

    TEST_CASE("invalid sequences") {
        CHECK_THROWS_AS(validate_sequence(seq({-1, -1}), 1), ValidationError);
        CHECK_THROWS_AS(validate_sequence(seq({-1, 0}), 1), ValidationError);
        CHECK_THROWS_AS(validate_sequence(seq({-1, 0, 2, 0, -1}), 2), ValidationError);
        CHECK_THROWS_AS(validate_sequence(seq({-1, 0, 1, 2, 1, 0, -1}), 1), ValidationError);
        CHECK_THROWS_AS(validate_sequence(seq({-1, 0, -1, 0, -1}), 1), ValidationError);
        CHECK_THROWS_AS(validate_sequence(seq({0, 1, 0}), 1), ValidationError);
        CHECK_NOTHROW(validate_sequence(seq({-1, 0, 1, 0, -1}), 1));
    }

    TEST_CASE("oracle response on the one-layer model") {
        const Model<Rational> model{Qs({"1", "1/2"}), Qs({"1/2", "7/10"})};
        CHECK(oracle_response(model, Q("3/2")) == forward(model).data);
    }

    TEST_CASE("oracle response on the cancelling model") {
        const Model<double> model{{1.0, 0.5, 0.5}, {0.5, 1.0 / std::sqrt(2.0), 0.5}};
        const auto data = oracle_response(model, 2.0);
        REQUIRE(data.size() == 2);
        CHECK(data.sigma == std::vector<double>{1.0, 1.5});
        CHECK(testing::close(data.alpha[1], 0.75 / std::sqrt(2.0)));
    }

    TEST_CASE("only the first interface reflecting") {
        const Model<Rational> model{Qs({"1", "1/3", "1/2"}), Qs({"-2/5", "0", "0"})};
        const auto data = oracle_response(model, Q("3"));
        CHECK(data.sigma == Qs({"1"}));
        CHECK(data.alpha == Qs({"-2/5"}));
    }

    TEST_CASE("counting sequences by branch vector") {
        CHECK(count_sequences_by({1, 1, 0}, {1, 0, 0}) == 1);
        CHECK(count_sequences_by({1, 2, 0}, {1, 0, 0}) == 1);
        CHECK(count_sequences_by({1, 2, 0}, {1, 1, 0}) == 0);
        for (std::size_t n = 0; n <= 4; ++n) {
            const auto k = primary_vector(n, 4);
            CHECK(count_sequences_by(k, left_shift(k)) == 1);
            CHECK(count_sequences_by_branch(k).size() == 1);
        }
    }

    TEST_CASE("sequence counts match the product of binomials") {
        for (const auto& k : members_up_to(4, 8)) {
            const auto counts = count_sequences_by_branch(k);
            std::set<TransitCountVector> box;
            for_each_in_box(branch_box(k), [&](const TransitCountVector& b) { box.insert(b); });
            std::set<TransitCountVector> reached;
            for (const auto& [b, count] : counts) {
                reached.insert(b);
                CHECK(box.contains(b));
                CHECK(b[b.size() - 1] == 0);
                CHECK(count == product_formula(k, b));
            }
            CHECK(reached == box);
        }
    }

    TEST_CASE("summed weights equal the amplitude polynomial") {
        Engine engine(5);
        for (std::size_t layers = 1; layers <= 4; ++layers) {
            std::vector<Rational> refl;
            for (std::size_t n = 0; n <= layers; ++n) refl.push_back(testing::random_rational(engine));
            const std::vector<Rational> tau(layers + 1, Rational(1));
            const auto weights = oracle_weights(Model<Rational>{tau, refl}, Rational(8));
            std::vector<TransitCountVector> expected;
            for (Count total = 1; total <= 8; ++total) testing::members_of_total(layers + 1, total, expected);
            CHECK(weights.size() == expected.size());
            for (const auto& k : expected) {
                REQUIRE(weights.contains(k));
                CHECK(weights.at(k) == amplitude_eval(refl, k));
            }
        }
    }

    TEST_CASE("the lattice is exactly the set of reachable transit count vectors") {
        Engine engine(6);
        for (std::size_t layers = 1; layers <= 4; ++layers) {
            for (int trial = 0; trial < 3; ++trial) {
                std::vector<double> tau;
                for (std::size_t n = 0; n <= layers; ++n) tau.push_back(uniform(engine, 0.2, 1.0));
                double total = 0;
                for (double t : tau) total += t;
                std::set<TransitCountVector> kappas;
                for (const auto& p : enumerate_sequences(layers, tau, total)) kappas.insert(stats(p, layers).kappa);
                CHECK(kappas.size() == enumerate_lattice_set(tau, total).size());
            }
        }
    }

    TEST_CASE("oracle agrees with forward on random models") {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            GenerateOptions options;
            options.layers = 1 + seed % 4;
            options.seed = seed;
            options.max_lattice = 300;
            const auto model = gen_random_generic<Rational>(options);
            CHECK(oracle_response(model, total_travel_time(model)) == forward(model).data);
        }
    }

    TEST_CASE("weights CSV") {
        const Model<Rational> model{Qs({"1", "1/2"}), Qs({"1/2", "7/10"})};
        std::ostringstream os;
        write_weights_csv(os, oracle_weights(model, Q("3/2")), model.tau);
        CHECK(os.str() == "1,0,1,1/2\n1,1,3/2,21/40\n");
    }
}
