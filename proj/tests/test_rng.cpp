#include <doctest.h>

#include <cmath>
#include <vector>

#include "thermonet/rng.hpp"

using namespace thermonet;

TEST_CASE("same seed reproduces the variate sequence") {
    RngStream a(42), b(42);
    for (int i = 0; i < 5; ++i) CHECK(a.next_uniform() == b.next_uniform());
    for (int i = 0; i < 5; ++i) CHECK(a.next_normal() == b.next_normal());
    CHECK(a.draw_count() == b.draw_count());
}

TEST_CASE("distinct seeds diverge within the first 100 draws") {
    RngStream a(42), b(43);
    bool differ = false;
    for (int i = 0; i < 100 && !differ; ++i) differ = a.next_uniform() != b.next_uniform();
    CHECK(differ);
}

TEST_CASE("seed zero is a valid non-degenerate stream") {
    RngStream s(0);
    const double first = s.next_uniform();
    bool varies = false;
    for (int i = 0; i < 10; ++i) varies = varies || s.next_uniform() != first;
    CHECK(varies);
}

TEST_CASE("uniforms stay in [0,1)") {
    RngStream s(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.next_uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal moments match N(0,1) within 4 Monte Carlo standard errors") {
    const int n = 1'000'000;
    RngStream s(2024);
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = s.next_normal();
        m1 += x;
        m2 += x * x;
        m3 += x * x * x;
        m4 += x * x * x * x;
    }
    m1 /= n;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double rn = std::sqrt(static_cast<double>(n));
    CHECK(std::abs(m1) < 4.0 / rn);                   // se(mean) = 1/sqrt(n)
    CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0) / rn);
    CHECK(std::abs(m3) < 4.0 * std::sqrt(15.0) / rn); // var(x^3) = 15
    CHECK(std::abs(m4 - 3.0) < 4.0 * std::sqrt(96.0) / rn);
    CHECK(std::abs(m1) < 0.005);
    CHECK(std::abs(m2 - 1.0) < 0.01);
}

TEST_CASE("next_below covers the range uniformly enough") {
    RngStream s(5);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 100000; ++i) ++counts[s.next_below(10)];
    for (const int c : counts) {
        CHECK(c > 9000);
        CHECK(c < 11000);
    }
}

TEST_CASE("interleaved draws replay identically") {
    RngStream a(99), b(99);
    std::vector<double> seq_a, seq_b;
    for (int i = 0; i < 50; ++i) {
        seq_a.push_back(a.next_normal());
        seq_a.push_back(a.next_uniform());
        seq_a.push_back(static_cast<double>(a.next_below(1000)));
    }
    for (int i = 0; i < 50; ++i) {
        seq_b.push_back(b.next_normal());
        seq_b.push_back(b.next_uniform());
        seq_b.push_back(static_cast<double>(b.next_below(1000)));
    }
    CHECK(seq_a == seq_b);
}

TEST_CASE("derive_seed yields distinct sub-seeds for nearby masters") {
    CHECK(derive_seed(0, 0) != derive_seed(0, 1));
    CHECK(derive_seed(0, 0) != derive_seed(1, 0));
    CHECK(derive_seed(41, 3) == derive_seed(41, 3));
}
