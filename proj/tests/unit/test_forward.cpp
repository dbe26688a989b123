#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "layerwave/amplitude.hpp"
#include "layerwave/error.hpp"
#include "layerwave/forward.hpp"
#include "layerwave/generate.hpp"

using namespace layerwave;
using testing::Q;
using testing::Qs;

namespace {

Model<Rational> random_rational_model(std::size_t layers, std::uint64_t seed) {
    GenerateOptions options;
    options.layers = layers;
    options.seed = seed;
    options.max_lattice = 5000;
    return gen_random_generic<Rational>(options);
}

}  // namespace

TEST_SUITE("forward") {
    TEST_CASE("one layer: the two primaries") {
        const auto result = forward(Model<double>{{1.0, 0.5}, {0.5, 0.7}});
        CHECK(result.data.sigma == std::vector<double>{1.0, 1.5});
        REQUIRE(result.data.size() == 2);
        CHECK(result.data.alpha[0] == 0.5);
        CHECK(testing::close(result.data.alpha[1], 0.525));

        const auto exact = forward(Model<Rational>{Qs({"1", "1/2"}), Qs({"1/2", "7/10"})});
        CHECK(exact.data.sigma == Qs({"1", "3/2"}));
        CHECK(exact.data.alpha == Qs({"1/2", "21/40"}));
    }

    TEST_CASE("the cancelling two-layer model") {
        const double r1 = 1.0 / std::sqrt(2.0);
        const auto result = forward(Model<double>{{1.0, 0.5, 0.5}, {0.5, r1, 0.5}});
        REQUIRE(result.data.size() == 2);
        CHECK(result.data.sigma == std::vector<double>{1.0, 1.5});
        CHECK(testing::close(result.data.alpha[1], 0.75 / std::sqrt(2.0)));
        CHECK(testing::close(result.data.alpha[1], 0.5303300859, 1e-10));
        CHECK_FALSE(result.map.is_bijective());
    }

    TEST_CASE("extended window") {
        ForwardOptions<Rational> options;
        options.t_max = Q("23/10");
        const auto result = forward(Model<Rational>{Qs({"1", "3/5"}), Qs({"1/2", "7/10"})}, options);
        CHECK(result.data.sigma == Qs({"1", "8/5", "11/5"}));
        CHECK(result.data.alpha == Qs({"1/2", "21/40", "-147/800"}));

        ForwardOptions<double> float_options;
        float_options.t_max = 2.3;
        const auto approx = forward(Model<double>{{1.0, 0.6}, {0.5, 0.7}}, float_options);
        REQUIRE(approx.data.size() == 3);
        CHECK(testing::close(approx.data.alpha[2], -0.18375));
    }

    TEST_CASE("enumeration matrix") {
        const auto one = forward(Model<Rational>{Qs({"1", "1/2"}), Qs({"1/2", "7/10"})});
        const auto a = enumeration_matrix(one.map, one.data);
        CHECK(a == primary_matrix(1));

        ForwardOptions<Rational> options;
        options.t_max = Q("23/10");
        const auto three = forward(Model<Rational>{Qs({"1", "3/5"}), Qs({"1/2", "7/10"})}, options);
        const auto b = enumeration_matrix(three.map, three.data);
        REQUIRE(b.rows == 2);
        REQUIRE(b.cols == 3);
        CHECK(b.values == std::vector<Count>{1, 1, 1, 0, 1, 2});

        const auto cancelled = forward(Model<double>{{1.0, 0.5, 0.5}, {0.5, 1.0 / std::sqrt(2.0), 0.5}});
        CHECK_THROWS_AS(enumeration_matrix(cancelled.map, cancelled.data), AlgorithmError);
    }

    TEST_CASE("primary columns form K and J inverts K") {
        for (std::size_t m = 0; m <= 20; ++m) {
            CHECK(primary_matrix(m) * primary_matrix_inverse(m) == IntMatrix::identity(m + 1));
            CHECK(primary_matrix_inverse(m) * primary_matrix(m) == IntMatrix::identity(m + 1));
        }
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto model = random_rational_model(3, seed);
            const auto result = forward(model);
            const auto a = enumeration_matrix(result.map, result.data);
            const auto columns = primary_columns(a);
            IntMatrix k(a.rows, columns.size());
            for (std::size_t c = 0; c < columns.size(); ++c) {
                for (std::size_t r = 0; r < a.rows; ++r) k(r, c) = a(r, columns[c]);
            }
            CHECK(k == primary_matrix(3));
            CHECK(row_times(model.tau, a) == result.data.sigma);
            CHECK(row_times(primary_times(a, result.data), primary_matrix_inverse(3)) == model.tau);
        }
    }

    TEST_CASE("generic models: d equals the lattice size and alpha_n = a(R, psi^-1(n))") {
        for (std::uint64_t seed = 10; seed < 16; ++seed) {
            const auto model = random_rational_model(2 + seed % 3, seed);
            const auto result = forward(model);
            const auto& map = result.map;
            CHECK(map.is_bijective());
            CHECK(result.data.size() == map.lattice.size());
            for (std::size_t n = 1; n <= map.d; ++n) {
                const auto pre = map.preimage(n);
                REQUIRE(pre.size() == 1);
                CHECK(result.data.alpha[n - 1] == amplitude_eval(model.refl, map.lattice.points[pre[0]]));
                CHECK(result.data.sigma[n - 1] == arrival_time(map.lattice.points[pre[0]], model.tau));
            }
            CHECK(result.data.sigma[0] == model.tau[0]);
            CHECK(result.data.alpha[0] == model.refl[0]);
            CHECK(result.data.sigma[1] == model.tau[0] + model.tau[1]);
            CHECK(result.data.alpha[1] == model.refl[1] * (1 - model.refl[0] * model.refl[0]));
        }
    }

    TEST_CASE("is_generic on constant travel times") {
        const auto report = is_generic(Model<Rational>{Qs({"1", "1", "1"}), Qs({"1/2", "1/3", "1/4"})});
        CHECK_FALSE(report.time_injective);
        CHECK_FALSE(report.generic());
        CHECK(report.margin == 0.0);
        bool found = false;
        for (const auto& [a, b] : report.collisions) {
            if ((a == TransitCountVector{1, 1, 1} && b == TransitCountVector{1, 2, 0}) ||
                (a == TransitCountVector{1, 2, 0} && b == TransitCountVector{1, 1, 1})) {
                found = true;
            }
        }
        CHECK(found);
    }

    TEST_CASE("is_generic on the cancelling model") {
        const auto report = is_generic(Model<double>{{1.0, 0.5, 0.5}, {0.5, 1.0 / std::sqrt(2.0), 0.5}});
        CHECK_FALSE(report.time_injective);
        CHECK(report.zero_amplitudes.size() == 2);
    }

    TEST_CASE("is_generic on random draws") {
        Engine engine(3);
        for (int trial = 0; trial < 10; ++trial) {
            Model<double> model;
            for (int n = 0; n < 4; ++n) {
                model.tau.push_back(uniform(engine, 0.1, 2.0));
                model.refl.push_back(random_sign(engine) * uniform(engine, 0.05, 0.8));
            }
            const auto report = is_generic(model);
            CHECK(report.generic());
            CHECK(report.margin > 0.0);
        }
    }

    TEST_CASE("locality: a small travel-time perturbation keeps A") {
        const auto model = random_rational_model(3, 42);
        const auto result = forward(model);
        const auto a = enumeration_matrix(result.map, result.data);
        const Rational total = total_travel_time(model);
        // Keep |tau| fixed and move every arrival by less than a quarter of the
        // smallest gap, counting the gap to the first point beyond the window.
        Rational gap = from_double<Rational>(is_generic(model).margin);
        Count max_total = 0;
        for (const auto& k : enumerate_lattice_set(model.tau, Rational(total + 1)).points) {
            max_total = std::max(max_total, k.total());
            const Rational t = arrival_time(k, model.tau);
            if (t > total) gap = std::min(gap, Rational(t - total));
        }
        const Rational step = gap / (4 * max_total);
        auto moved = model;
        moved.tau[1] += step;
        moved.tau[2] -= step;
        const auto shifted = forward(moved);
        CHECK(shifted.map.lattice.points == result.map.lattice.points);
        CHECK(enumeration_matrix(shifted.map, shifted.data) == a);
        CHECK(shifted.data.sigma != result.data.sigma);
    }

    TEST_CASE("ill-posed pairs share their data") {
        const auto [base, extended] = ill_posed_pair(Q("1"), 1, Qs({"3/10", "2/5"}));
        CHECK(extended.refl[2] == Q("2/35"));
        CHECK(forward(base).data == forward(extended).data);

        const double r1 = 1.0 / std::sqrt(2.0);
        const auto [fb, fe] = ill_posed_pair(1.0, 1, std::vector<double>{0.3, r1});
        CHECK(testing::close(fe.refl[2], 0.3, 1e-12));

        CHECK_THROWS_AS(ill_posed_pair(Q("1"), 1, Qs({"0", "1/2"})), ValidationError);
        CHECK_THROWS_AS(ill_posed_pair(Q("1"), 1, Qs({"1/2"})), ValidationError);
    }

    TEST_CASE("every amplitude cancelling is an error") {
        CHECK_THROWS_AS(forward(Model<Rational>{Qs({"1", "1"}), Qs({"0", "0"})}), AlgorithmError);
    }

    TEST_CASE("guards and tolerances") {
        ForwardOptions<double> options;
        options.limits.max_terms = 10;
        options.t_max = 2.0;
        CHECK_THROWS_AS(forward(Model<double>{{1.0, 0.01}, {0.5, 0.5}}, options), GuardError);
        ForwardOptions<Rational> exact;
        exact.time_tol = Q("1/100");
        CHECK_THROWS_AS(forward(Model<Rational>{Qs({"1", "1"}), Qs({"1/2", "1/2"})}, exact), ValidationError);
    }

    TEST_CASE("psi CSV rows follow arrival order") {
        ForwardOptions<Rational> options;
        options.t_max = Q("23/10");
        const auto result = forward(Model<Rational>{Qs({"1", "3/5"}), Qs({"1/2", "7/10"})}, options);
        std::ostringstream os;
        write_psi_csv(os, result.map);
        CHECK(os.str() == "1,0,1,1/2,1\n1,1,8/5,21/40,2\n1,2,11/5,-147/800,3\n");
    }
}
