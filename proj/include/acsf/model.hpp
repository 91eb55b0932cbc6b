#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "acsf/errors.hpp"
#include "acsf/hash.hpp"

namespace acsf {

using Symbol = std::uint16_t;

/// Frequency totals are capped so that 32-bit coder ranges times cumulative
/// counts stay inside 48 bits.
inline constexpr std::uint32_t kMaxTotalFreq = 1u << 16;

/// Static probability map over an integer frequency table.
///
/// Slots are the interval positions of the map; symbols are the source
/// alphabet. The two coincide for a freshly built model and diverge once a
/// keyed permutation (or a deliberately width-breaking swap) rebinds them.
/// The optional forbidden slot sits at the canonical top of the map, after
/// every real slot, and never moves under permutation.
class SymbolModel {
public:
    std::uint32_t alphabet_size() const noexcept { return static_cast<std::uint32_t>(slot_freq_.size()); }
    std::uint32_t total() const noexcept { return total_; }
    std::uint32_t forbidden_freq() const noexcept { return forbidden_freq_; }
    bool has_forbidden() const noexcept { return forbidden_freq_ > 0; }

    std::uint32_t slot_freq(std::uint32_t slot) const { return slot_freq_.at(slot); }
    std::uint32_t slot_low(std::uint32_t slot) const { return cum_.at(slot); }

    Symbol symbol_of_slot(std::uint32_t slot) const { return slot_sym_.at(slot); }
    std::uint32_t slot_of_symbol(Symbol s) const {
        if (s >= sym_slot_.size())
            throw Error(Errc::symbol_out_of_range,
                        "symbol " + std::to_string(s) + " with alphabet " +
                            std::to_string(alphabet_size()));
        return sym_slot_[s];
    }
    std::uint32_t freq_of_symbol(Symbol s) const { return slot_freq_[slot_of_symbol(s)]; }

    /// Cumulative bounds of a symbol's slot, for the coder's interval step.
    struct Range {
        std::uint32_t low;
        std::uint32_t high;
    };
    Range symbol_range(Symbol s) const {
        std::uint32_t slot = slot_of_symbol(s);
        return {cum_[slot], cum_[slot + 1]};
    }

    /// Index of the forbidden slot (== alphabet_size()); its range is the
    /// top [total - forbidden_freq, total) band of the map.
    std::uint32_t forbidden_slot() const noexcept { return alphabet_size(); }
    bool is_forbidden_slot(std::uint32_t slot) const noexcept { return slot == alphabet_size(); }
    std::uint32_t forbidden_low() const noexcept { return total_ - forbidden_freq_; }

    /// Maps a scaled cumulative value in [0, total) back to its slot.
    /// Linear scan for small alphabets, binary search otherwise.
    std::uint32_t find_slot(std::uint32_t scaled) const {
        if (has_forbidden() && scaled >= forbidden_low()) return forbidden_slot();
        const std::uint32_t n = alphabet_size();
        if (n <= 32) {
            std::uint32_t slot = 0;
            while (slot + 1 < n && cum_[slot + 1] <= scaled) ++slot;
            return slot;
        }
        auto it = std::upper_bound(cum_.begin(), cum_.begin() + n + 1, scaled);
        return static_cast<std::uint32_t>(it - cum_.begin()) - 1;
    }

    std::vector<std::uint32_t> freqs_by_slot() const { return slot_freq_; }
    std::vector<std::uint32_t> freqs_by_symbol() const {
        std::vector<std::uint32_t> out(alphabet_size());
        for (Symbol s = 0; s < out.size(); ++s) out[s] = slot_freq_[sym_slot_[s]];
        return out;
    }

    bool operator==(const SymbolModel&) const = default;

    friend SymbolModel build_model(std::span<const std::uint32_t> freqs);
    friend SymbolModel add_forbidden(const SymbolModel& m, std::uint32_t forbidden_freq);
    friend SymbolModel permute_model(const SymbolModel& m, const struct PermutationKey& key);
    friend SymbolModel naive_swap_model(const SymbolModel& m, std::uint32_t i, std::uint32_t j);

private:
    void rebuild_tables() {
        const std::size_t n = slot_freq_.size();
        cum_.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) cum_[i + 1] = cum_[i] + slot_freq_[i];
        total_ = cum_[n] + forbidden_freq_;
        sym_slot_.assign(n, 0);
        for (std::uint32_t slot = 0; slot < n; ++slot) sym_slot_[slot_sym_[slot]] = slot;
    }

    std::vector<std::uint32_t> slot_freq_;  // interval width per slot
    std::vector<std::uint32_t> cum_;        // cum_[i] = sum of widths of slots < i
    std::vector<Symbol> slot_sym_;          // slot -> symbol
    std::vector<std::uint32_t> sym_slot_;   // symbol -> slot
    std::uint32_t forbidden_freq_ = 0;
    std::uint32_t total_ = 0;
};

inline SymbolModel build_model(std::span<const std::uint32_t> freqs) {
    if (freqs.empty()) throw Error(Errc::empty_alphabet, "frequency list is empty");
    std::uint64_t sum = 0;
    for (std::uint32_t f : freqs) {
        if (f == 0) throw Error(Errc::zero_frequency, "every real symbol needs freq >= 1");
        sum += f;
    }
    if (sum > kMaxTotalFreq)
        throw Error(Errc::frequency_overflow,
                    "total " + std::to_string(sum) + " exceeds " + std::to_string(kMaxTotalFreq));

    SymbolModel m;
    m.slot_freq_.assign(freqs.begin(), freqs.end());
    m.slot_sym_.resize(freqs.size());
    std::iota(m.slot_sym_.begin(), m.slot_sym_.end(), Symbol{0});
    m.rebuild_tables();
    return m;
}

inline SymbolModel build_model(std::initializer_list<std::uint32_t> freqs) {
    return build_model(std::span<const std::uint32_t>(freqs.begin(), freqs.size()));
}

/// Reserves the top band of the map for a symbol the encoder never emits;
/// every real symbol keeps its absolute width.
inline SymbolModel add_forbidden(const SymbolModel& m, std::uint32_t forbidden_freq) {
    if (forbidden_freq == 0) return m;
    std::uint64_t new_total = std::uint64_t(m.total()) - m.forbidden_freq() + forbidden_freq;
    if (new_total > kMaxTotalFreq)
        throw Error(Errc::frequency_overflow, "forbidden freq overflows the map");
    SymbolModel out = m;
    out.forbidden_freq_ = forbidden_freq;
    out.rebuild_tables();
    return out;
}

/// Keyed bijection over real symbol slots; derived deterministically from
/// 256-bit seed material.
struct PermutationKey {
    std::array<std::uint8_t, 32> seed{};
    /// perm[i] = destination slot of the content currently in slot i.
    std::vector<std::uint32_t> perm;

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(perm.size()); }

    bool is_bijection() const {
        std::vector<std::uint32_t> sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        for (std::uint32_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != i) return false;
        return true;
    }
};

namespace detail {

/// Counter-mode SHA-256 keystream; gives the shuffle a keyed, reproducible
/// source of 64-bit draws.
class KeyedPrng {
public:
    KeyedPrng(ByteView seed, std::uint32_t domain) : domain_(domain) {
        seed_.assign(seed.begin(), seed.end());
    }

    std::uint64_t next() {
        if (pos_ == block_.size()) refill();
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | block_[pos_++];
        return v;
    }

    /// Unbiased draw in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t residue = (std::uint64_t(0) - bound) % bound;  // 2^64 mod bound
        const std::uint64_t limit = std::uint64_t(0) - residue;            // largest multiple
        std::uint64_t v;
        do {
            v = next();
        } while (limit != 0 && v >= limit);
        return v % bound;
    }

private:
    void refill() {
        Bytes input(seed_);
        const char* tag = "acsf.perm";
        input.insert(input.end(), tag, tag + 9);
        for (int shift = 24; shift >= 0; shift -= 8)
            input.push_back(static_cast<std::uint8_t>(domain_ >> shift));
        for (int shift = 56; shift >= 0; shift -= 8)
            input.push_back(static_cast<std::uint8_t>(counter_ >> shift));
        Digest256 d = sha256(input);
        std::copy(d.begin(), d.end(), block_.begin());
        pos_ = 0;
        ++counter_;
    }

    Bytes seed_;
    std::uint32_t domain_;
    std::uint64_t counter_ = 0;
    std::array<std::uint8_t, 32> block_{};
    std::size_t pos_ = 32;  // force refill on first draw
};

}  // namespace detail

/// Fisher-Yates shuffle driven by the keyed stream; same (seed, n) always
/// yields the same permutation.
inline PermutationKey derive_permutation(const std::array<std::uint8_t, 32>& seed, std::uint32_t n) {
    PermutationKey key;
    key.seed = seed;
    key.perm.resize(n);
    std::iota(key.perm.begin(), key.perm.end(), 0u);
    detail::KeyedPrng prng(ByteView(seed.data(), seed.size()), n);
    for (std::uint32_t i = n; i > 1; --i) {
        std::uint32_t j = static_cast<std::uint32_t>(prng.next_below(i));
        std::swap(key.perm[i - 1], key.perm[j]);
    }
    return key;
}

/// Moves each slot's content (symbol binding and width together) to its
/// keyed destination. Every symbol keeps its own width, so interval widths
/// of any message are unchanged; only the slot order is secret.
/// The forbidden slot stays at the canonical top and is never permuted.
inline SymbolModel permute_model(const SymbolModel& m, const PermutationKey& key) {
    if (key.size() != m.alphabet_size())
        throw Error(Errc::key_size_mismatch,
                    "key for " + std::to_string(key.size()) + " slots, model has " +
                        std::to_string(m.alphabet_size()));
    SymbolModel out = m;
    for (std::uint32_t i = 0; i < m.alphabet_size(); ++i) {
        out.slot_freq_[key.perm[i]] = m.slot_freq_[i];
        out.slot_sym_[key.perm[i]] = m.slot_sym_[i];
    }
    out.rebuild_tables();
    return out;
}

/// Exchanges the symbol labels of two slots while leaving the slot widths
/// in place, so each of the two symbols now codes with the other's width.
/// This is the width-breaking rebinding that costs compression; it exists
/// to demonstrate the expansion it causes.
inline SymbolModel naive_swap_model(const SymbolModel& m, std::uint32_t i, std::uint32_t j) {
    if (i >= m.alphabet_size() || j >= m.alphabet_size())
        throw Error(Errc::slot_out_of_range, "slot beyond alphabet");
    if (i == j) throw Error(Errc::slot_out_of_range, "slots must differ");
    SymbolModel out = m;
    std::swap(out.slot_sym_[i], out.slot_sym_[j]);
    out.rebuild_tables();
    return out;
}

}  // namespace acsf
