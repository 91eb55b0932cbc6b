#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "acsf/model.hpp"
#include "test_support.hpp"

using namespace acsf;

namespace {

std::array<std::uint8_t, 32> filled_seed(std::uint8_t v) {
    std::array<std::uint8_t, 32> s{};
    s.fill(v);
    return s;
}

}  // namespace

TEST_CASE("build_model validates input", "[model]") {
    CHECK_THROWS_MATCHES(build_model(std::vector<std::uint32_t>{}), Error,
                         ErrorMatcher(Errc::empty_alphabet));
    CHECK_THROWS_MATCHES(build_model({1, 0, 2}), Error, ErrorMatcher(Errc::zero_frequency));
    CHECK_THROWS_MATCHES(build_model({65536, 1}), Error,
                         ErrorMatcher(Errc::frequency_overflow));
    CHECK_NOTHROW(build_model({65535, 1}));  // exactly at the cap
    CHECK_NOTHROW(build_model({65536}));
}

TEST_CASE("cumulative layout and slot lookup", "[model]") {
    SymbolModel m = build_model({1, 2, 3, 4});
    CHECK(m.alphabet_size() == 4);
    CHECK(m.total() == 10);
    CHECK(m.slot_low(0) == 0);
    CHECK(m.slot_low(1) == 1);
    CHECK(m.slot_low(2) == 3);
    CHECK(m.slot_low(3) == 6);
    for (Symbol s = 0; s < 4; ++s) {
        CHECK(m.slot_of_symbol(s) == s);
        CHECK(m.symbol_of_slot(s) == s);
        auto r = m.symbol_range(s);
        CHECK(r.high - r.low == m.freq_of_symbol(s));
    }
    const std::uint32_t expect[10] = {0, 1, 1, 2, 2, 2, 3, 3, 3, 3};
    for (std::uint32_t v = 0; v < 10; ++v) CHECK(m.find_slot(v) == expect[v]);
    CHECK_THROWS_MATCHES(m.symbol_range(4), Error, ErrorMatcher(Errc::symbol_out_of_range));
}

TEST_CASE("binary-search lookup agrees with linear scan", "[model]") {
    std::vector<std::uint32_t> freqs(100);
    for (std::size_t i = 0; i < freqs.size(); ++i) freqs[i] = 1 + (i * 7 % 13);
    SymbolModel big = build_model(freqs);  // alphabet > 32 uses upper_bound
    for (std::uint32_t v = 0; v < big.total(); ++v) {
        std::uint32_t slot = big.find_slot(v);
        CHECK(big.slot_low(slot) <= v);
        CHECK(v < big.slot_low(slot) + big.slot_freq(slot));
    }
}

TEST_CASE("forbidden band sits on top and preserves widths", "[model]") {
    SymbolModel base = build_model({1, 2, 3, 4});
    SymbolModel m = add_forbidden(base, 6);
    CHECK(m.total() == 16);
    CHECK(m.forbidden_freq() == 6);
    CHECK(m.forbidden_low() == 10);
    for (Symbol s = 0; s < 4; ++s) CHECK(m.freq_of_symbol(s) == base.freq_of_symbol(s));
    for (std::uint32_t v = 10; v < 16; ++v) {
        CHECK(m.find_slot(v) == m.forbidden_slot());
        CHECK(m.is_forbidden_slot(m.find_slot(v)));
    }
    CHECK(m.find_slot(9) == 3);

    CHECK(add_forbidden(base, 0) == base);
    CHECK_THROWS_MATCHES(add_forbidden(build_model({65530}), 10), Error,
                         ErrorMatcher(Errc::frequency_overflow));
}

TEST_CASE("derived permutations are deterministic bijections", "[model]") {
    const auto zero = filled_seed(0);
    for (std::uint32_t n : {1u, 2u, 5u, 16u, 256u}) {
        PermutationKey a = derive_permutation(zero, n);
        PermutationKey b = derive_permutation(zero, n);
        CHECK(a.perm == b.perm);
        CHECK(a.is_bijection());
    }
    // pinned draws, guarding the PRF-to-shuffle pipeline against drift
    CHECK(derive_permutation(zero, 4).perm == std::vector<std::uint32_t>{2, 1, 0, 3});
    CHECK(derive_permutation(filled_seed(0x11), 4).perm == std::vector<std::uint32_t>{0, 2, 3, 1});
    CHECK(derive_permutation(zero, 8).perm == std::vector<std::uint32_t>{1, 6, 5, 7, 0, 3, 4, 2});
    CHECK(derive_permutation(filled_seed(0x11), 8).perm ==
          std::vector<std::uint32_t>{5, 6, 3, 1, 7, 4, 2, 0});
    CHECK(derive_permutation(zero, 16).perm != derive_permutation(filled_seed(1), 16).perm);
}

TEST_CASE("keyed permutation moves width with symbol", "[model]") {
    SymbolModel base = add_forbidden(build_model({1, 2, 3, 4}), 3);
    PermutationKey key = derive_permutation(filled_seed(0x11), 4);  // 0,2,3,1
    SymbolModel p = permute_model(base, key);

    CHECK(p.total() == base.total());
    CHECK(p.forbidden_freq() == 3);
    for (Symbol s = 0; s < 4; ++s) CHECK(p.freq_of_symbol(s) == base.freq_of_symbol(s));
    // content of slot i landed in slot perm[i]
    for (std::uint32_t slot = 0; slot < 4; ++slot) {
        CHECK(p.slot_of_symbol(base.symbol_of_slot(slot)) == key.perm[slot]);
        CHECK(p.slot_freq(key.perm[slot]) == base.slot_freq(slot));
    }
    // forbidden band still the top region
    CHECK(p.forbidden_low() == p.total() - 3);
    CHECK(p.is_forbidden_slot(p.find_slot(p.total() - 1)));

    PermutationKey wrong = derive_permutation(filled_seed(0x11), 5);
    CHECK_THROWS_MATCHES(permute_model(base, wrong), Error,
                         ErrorMatcher(Errc::key_size_mismatch));
}

TEST_CASE("permutation preserves widths for random models", "[model]") {
    std::mt19937 rng(7);
    for (int round = 0; round < 50; ++round) {
        std::uint32_t n = 2 + rng() % 40;
        std::vector<std::uint32_t> freqs(n);
        for (auto& f : freqs) f = 1 + rng() % 100;
        SymbolModel base = build_model(freqs);
        auto seed = filled_seed(static_cast<std::uint8_t>(round));
        SymbolModel p = permute_model(base, derive_permutation(seed, n));
        for (Symbol s = 0; s < n; ++s) CHECK(p.freq_of_symbol(s) == base.freq_of_symbol(s));
    }
}

TEST_CASE("naive swap exchanges labels but not widths", "[model]") {
    SymbolModel base = build_model({1, 2, 3, 4});
    SymbolModel s = naive_swap_model(base, 0, 3);
    // symbol A now codes with D's old width and vice versa
    CHECK(s.freq_of_symbol(0) == 4);
    CHECK(s.freq_of_symbol(3) == 1);
    CHECK(s.freq_of_symbol(1) == 2);
    CHECK(s.freq_of_symbol(2) == 3);
    // slot widths unchanged
    for (std::uint32_t slot = 0; slot < 4; ++slot) CHECK(s.slot_freq(slot) == base.slot_freq(slot));

    CHECK_THROWS_MATCHES(naive_swap_model(base, 0, 4), Error,
                         ErrorMatcher(Errc::slot_out_of_range));
    CHECK_THROWS_MATCHES(naive_swap_model(base, 2, 2), Error,
                         ErrorMatcher(Errc::slot_out_of_range));
}

TEST_CASE("frequency views by slot and by symbol", "[model]") {
    SymbolModel base = build_model({1, 2, 3, 4});
    SymbolModel p = permute_model(base, derive_permutation(filled_seed(0x11), 4));  // 0,2,3,1
    CHECK(p.freqs_by_symbol() == std::vector<std::uint32_t>{1, 2, 3, 4});
    CHECK(p.freqs_by_slot() == std::vector<std::uint32_t>{1, 4, 2, 3});
}
