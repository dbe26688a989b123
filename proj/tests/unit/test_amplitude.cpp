#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "layerwave/amplitude.hpp"
#include "layerwave/error.hpp"

using namespace layerwave;
using testing::Q;
using testing::Qs;

namespace {

std::vector<TransitCountVector> members_up_to(std::size_t size, Count max_total) {
    std::vector<TransitCountVector> out;
    for (Count total = 1; total <= max_total; ++total) testing::members_of_total(size, total, out);
    return out;
}

std::vector<Rational> random_point(Engine& engine, std::size_t size) {
    std::vector<Rational> x;
    for (std::size_t n = 0; n < size; ++n) x.push_back(testing::random_rational(engine));
    return x;
}

}  // namespace

TEST_SUITE("amplitude") {
    TEST_CASE("binomials") {
        CHECK(binomial(5, 2) == 10);
        CHECK(binomial(3, 0) == 1);
        CHECK(binomial(2, 3) == 0);
        CHECK(binomial(60, 30) == 118264581564861424LL);
        CHECK_THROWS_AS(binomial(200, 100), GuardError);
        CHECK(multi_binomial({1, 2, 2}, {1, 1, 0}) == 2);
    }

    TEST_CASE("single terms of simple vectors") {
        auto terms = amplitude_terms({1, 0});
        REQUIRE(terms.size() == 1);
        CHECK(terms[0].coeff == 1);
        CHECK(terms[0].x_exponents == TransitCountVector{1, 0});
        CHECK(terms[0].q_exponents == TransitCountVector{0, 0});

        terms = amplitude_terms({1, 2, 0});
        REQUIRE(terms.size() == 1);
        CHECK(terms[0].coeff == -1);
        CHECK(terms[0].x_exponents == TransitCountVector{1, 2, 0});
        CHECK(terms[0].q_exponents == TransitCountVector{1, 0, 0});

        for (std::size_t n = 0; n <= 4; ++n) {
            terms = amplitude_terms(primary_vector(n, 4));
            REQUIRE(terms.size() == 1);
            CHECK(terms[0].coeff == 1);
            TransitCountVector x(5);
            x[n] = 1;
            TransitCountVector q(5);
            for (std::size_t j = 0; j < n; ++j) q[j] = 1;
            CHECK(terms[0].x_exponents == x);
            CHECK(terms[0].q_exponents == q);
        }
    }

    TEST_CASE("terms follow the branch box in lexicographic order") {
        const TransitCountVector k{1, 2, 2, 0};
        const auto terms = amplitude_terms(k);
        REQUIRE(terms.size() == 2);
        CHECK(terms[0].q_exponents == TransitCountVector{1, 1, 0, 0});
        CHECK(terms[1].q_exponents == TransitCountVector{1, 2, 0, 0});
        // b = (1,1,0,0): C(k,b) = 2, C(shift-u, b-u) = C((1,1,0,0),(0,0,0,0)) = 1, sign (-1)^{|(1,1,0,0)|}
        CHECK(terms[0].coeff == 2);
        // b = (1,2,0,0): C(k,b) = 1, C((1,1,0,0),(0,1,0,0)) = 1, sign (-1)^{|(1,0,0,0)|}
        CHECK(terms[1].coeff == -1);
        CHECK_THROWS_AS(amplitude_terms({1, 0, 1}), ValidationError);
    }

    TEST_CASE("terms are nonzero, homogeneous of degree 2|k|-1 and free of q_M") {
        for (const auto& k : members_up_to(5, 7)) {
            for (const auto& term : amplitude_terms(k)) {
                CHECK(term.coeff != 0);
                CHECK(term.degree() == 2 * k.total() - 1);
                CHECK(term.q_exponents[k.size() - 1] == 0);
            }
        }
    }

    TEST_CASE("evaluation at the two-layer example") {
        const std::vector<double> x{0.5, 1.0 / std::sqrt(2.0), 0.5};
        CHECK(testing::close(amplitude_eval(x, {1, 1, 1}), 0.1875));
        CHECK(testing::close(amplitude_eval(x, {1, 2, 0}), -0.1875));
        CHECK(std::fabs(amplitude_eval(x, {1, 1, 1}) + amplitude_eval(x, {1, 2, 0})) < 1e-15);
    }

    TEST_CASE("the zero point gives zero") {
        for (const auto& k : members_up_to(4, 6)) {
            CHECK(is_zero(amplitude_eval(std::vector<Rational>(4, Rational(0)), k)));
        }
    }

    TEST_CASE("dimension mismatch") {
        CHECK_THROWS_AS(amplitude_eval(std::vector<double>{0.1, 0.2}, {1, 1, 0}), ValidationError);
    }

    TEST_CASE("redundancy_ratio_check") {
        CHECK(redundancy_ratio_check({1, 1, 1, 0}, 1) == TransitCountVector{1, 2, 1, 0});
        CHECK_FALSE(redundancy_ratio_check({1, 2, 1, 0}, 1).has_value());
        CHECK(redundancy_ratio_check({1, 1, 1, 1}, 2) == TransitCountVector{1, 1, 2, 1});
        CHECK_FALSE(redundancy_ratio_check({1, 1, 1, 1}, 0).has_value());
        CHECK_FALSE(redundancy_ratio_check({1, 1, 1, 1}, 3).has_value());
    }

    TEST_CASE("oddness, zero padding, primaries and redundancy at random rational points") {
        Engine engine(21);
        const std::size_t size = 4;
        for (const auto& k : members_up_to(size, 6)) {
            for (int trial = 0; trial < 3; ++trial) {
                const auto x = random_point(engine, size);
                std::vector<Rational> minus;
                for (const auto& v : x) minus.push_back(-v);
                const Rational a = amplitude_eval(x, k);
                CHECK(amplitude_eval(minus, k) == -a);

                auto padded = x;
                padded.push_back(testing::random_rational(engine));
                padded.push_back(testing::random_rational(engine));
                CHECK(amplitude_eval(padded, k.resized(size + 2)) == a);

                for (std::size_t n = 1; n + 1 < size; ++n) {
                    if (auto next = redundancy_ratio_check(k, n)) {
                        CHECK(amplitude_eval(x, *next) + 2 * x[n - 1] * x[n] * a == 0);
                    }
                }
            }
        }
        for (std::size_t n = 0; n < size; ++n) {
            const auto x = random_point(engine, size);
            Rational expected = x[n];
            for (std::size_t j = 0; j < n; ++j) expected *= 1 - x[j] * x[j];
            CHECK(amplitude_eval(x, primary_vector(n, size - 1)) == expected);
        }
    }

    TEST_CASE("term CSV") {
        std::ostringstream os;
        write_terms_csv(os, amplitude_terms({1, 2, 0}));
        CHECK(os.str() == "-1,1,2,0,1,0,0\n");
    }
}
