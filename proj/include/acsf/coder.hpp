#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "acsf/bitio.hpp"
#include "acsf/errors.hpp"
#include "acsf/model.hpp"

namespace acsf {

namespace coder {
inline constexpr std::uint32_t kTop = 0xFFFFFFFFu;
inline constexpr std::uint32_t kHalf = 0x80000000u;
inline constexpr std::uint32_t kQuarter = 0x40000000u;
inline constexpr std::uint32_t kThreeQuarters = 0xC0000000u;
}  // namespace coder

/// 32-bit register arithmetic encoder with carry handling via pending bits.
/// Interval invariant between symbols: high - low + 1 > kQuarter, so the
/// 48-bit products below never overflow with totals capped at 2^16.
class StreamEncoder {
public:
    void encode(const SymbolModel& m, Symbol s) {
        auto r = m.symbol_range(s);
        const std::uint64_t range = std::uint64_t(high_) - low_ + 1;
        high_ = low_ + static_cast<std::uint32_t>(range * r.high / m.total()) - 1;
        low_ = low_ + static_cast<std::uint32_t>(range * r.low / m.total());
        renormalize();
    }

    /// Terminates the code: one disambiguating bit plus pending, which pins
    /// the final interval against zero-fill on the decode side.
    void flush() {
        ++pending_;
        emit(low_ < coder::kQuarter ? 0 : 1);
    }

    std::uint64_t bit_count() const noexcept { return sink_.bit_count(); }
    const Bytes& bytes() const noexcept { return sink_.bytes(); }
    Bytes take_bytes() { return sink_.take(); }

    void reset() {
        low_ = 0;
        high_ = coder::kTop;
        pending_ = 0;
        sink_.take();
    }

private:
    void renormalize() {
        for (;;) {
            if (high_ < coder::kHalf) {
                emit(0);
            } else if (low_ >= coder::kHalf) {
                emit(1);
                low_ -= coder::kHalf;
                high_ -= coder::kHalf;
            } else if (low_ >= coder::kQuarter && high_ < coder::kThreeQuarters) {
                ++pending_;
                low_ -= coder::kQuarter;
                high_ -= coder::kQuarter;
            } else {
                break;
            }
            low_ <<= 1;
            high_ = (high_ << 1) | 1;
        }
    }

    void emit(int bit) {
        sink_.push_bit(bit);
        for (; pending_ > 0; --pending_) sink_.push_bit(!bit);
    }

    std::uint32_t low_ = 0;
    std::uint32_t high_ = coder::kTop;
    std::uint64_t pending_ = 0;
    BitSink sink_;
};

/// Mirror of the encoder. The source zero-fills past the end, so decoding
/// always makes progress; garbage input yields garbage symbols or a
/// forbidden-band hit, never a stuck state.
class StreamDecoder {
public:
    explicit StreamDecoder(ByteView data) : source_(data) {
        for (int i = 0; i < 32; ++i) code_ = (code_ << 1) | std::uint32_t(source_.next_bit());
    }

    Symbol decode(const SymbolModel& m) {
        const std::uint64_t range = std::uint64_t(high_) - low_ + 1;
        const std::uint32_t scaled =
            static_cast<std::uint32_t>(((std::uint64_t(code_ - low_) + 1) * m.total() - 1) / range);
        const std::uint32_t slot = m.find_slot(scaled);
        if (m.is_forbidden_slot(slot)) throw ForbiddenSymbolError(decoded_);
        const Symbol s = m.symbol_of_slot(slot);
        auto r = m.symbol_range(s);
        high_ = low_ + static_cast<std::uint32_t>(range * r.high / m.total()) - 1;
        low_ = low_ + static_cast<std::uint32_t>(range * r.low / m.total());
        renormalize();
        ++decoded_;
        return s;
    }

    std::uint64_t symbols_decoded() const noexcept { return decoded_; }

    /// Bits pulled from the source so far, zero-fill included.
    std::uint64_t bits_consumed() const noexcept { return source_.bits_read(); }

private:
    void renormalize() {
        for (;;) {
            if (high_ < coder::kHalf) {
            } else if (low_ >= coder::kHalf) {
                low_ -= coder::kHalf;
                high_ -= coder::kHalf;
                code_ -= coder::kHalf;
            } else if (low_ >= coder::kQuarter && high_ < coder::kThreeQuarters) {
                low_ -= coder::kQuarter;
                high_ -= coder::kQuarter;
                code_ -= coder::kQuarter;
            } else {
                break;
            }
            low_ <<= 1;
            high_ = (high_ << 1) | 1;
            code_ = (code_ << 1) | std::uint32_t(source_.next_bit());
        }
    }

    std::uint32_t low_ = 0;
    std::uint32_t high_ = coder::kTop;
    std::uint32_t code_ = 0;
    std::uint64_t decoded_ = 0;
    BitSource source_;
};

/// One complete coding cycle: fresh registers, message, terminating flush.
inline Bytes encode_stream(const SymbolModel& m, std::span<const Symbol> msg) {
    StreamEncoder enc;
    for (Symbol s : msg) enc.encode(m, s);
    enc.flush();
    return enc.take_bytes();
}

inline std::vector<Symbol> decode_stream(const SymbolModel& m, ByteView data, std::size_t n) {
    if (n > 0 && data.empty())
        throw Error(Errc::unexpected_end_of_data, "no code bytes for a nonempty message");
    StreamDecoder dec(data);
    std::vector<Symbol> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(dec.decode(m));
    return out;
}

/// Decode with a per-symbol record of how many source bits had been pulled
/// when that symbol was resolved. Symbol i is a function of exactly the
/// first bits_at[i] bits, which is what makes prefix-intactness after a bit
/// flip checkable.
struct TracedDecode {
    std::vector<Symbol> symbols;
    std::vector<std::uint64_t> bits_at;
    std::uint64_t bits_consumed = 0;
};

inline TracedDecode decode_stream_traced(const SymbolModel& m, ByteView data, std::size_t n) {
    if (n > 0 && data.empty())
        throw Error(Errc::unexpected_end_of_data, "no code bytes for a nonempty message");
    TracedDecode out;
    out.symbols.reserve(n);
    out.bits_at.reserve(n);
    StreamDecoder dec(data);
    for (std::size_t i = 0; i < n; ++i) {
        out.bits_at.push_back(dec.bits_consumed());
        out.symbols.push_back(dec.decode(m));
    }
    out.bits_consumed = dec.bits_consumed();
    return out;
}

}  // namespace acsf
