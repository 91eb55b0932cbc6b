#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "acsf/bytes.hpp"

namespace acsf {

/// Collects bits MSB-first into a byte buffer.
class BitSink {
public:
    void push_bit(int bit) {
        if (sub_ == 0) buf_.push_back(0);
        if (bit) buf_.back() |= static_cast<std::uint8_t>(0x80u >> sub_);
        sub_ = (sub_ + 1) & 7;
        ++count_;
    }

    std::uint64_t bit_count() const noexcept { return count_; }

    /// Zero-padded to a whole byte.
    const Bytes& bytes() const noexcept { return buf_; }

    Bytes take() {
        Bytes out = std::move(buf_);
        buf_.clear();
        sub_ = 0;
        count_ = 0;
        return out;
    }

private:
    Bytes buf_;
    unsigned sub_ = 0;
    std::uint64_t count_ = 0;
};

/// Streams bits MSB-first out of a byte buffer. Reads past the end return 0
/// forever: a terminated arithmetic code stays decodable that way, and the
/// decoder can always pull the lookahead bits it wants.
class BitSource {
public:
    explicit BitSource(ByteView data) : data_(data) {}

    int next_bit() {
        int bit = 0;
        if (pos_ < data_.size()) bit = (data_[pos_] >> (7 - sub_)) & 1;
        ++read_;
        sub_ = (sub_ + 1) & 7;
        if (sub_ == 0) ++pos_;
        return bit;
    }

    /// Bits pulled so far, including synthetic zeros past the end.
    std::uint64_t bits_read() const noexcept { return read_; }

    std::uint64_t bit_size() const noexcept { return std::uint64_t(data_.size()) * 8; }
    bool exhausted() const noexcept { return read_ >= bit_size(); }

private:
    ByteView data_;
    std::size_t pos_ = 0;
    unsigned sub_ = 0;
    std::uint64_t read_ = 0;
};

}  // namespace acsf
