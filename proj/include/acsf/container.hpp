#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acsf/coder.hpp"
#include "acsf/errors.hpp"
#include "acsf/model.hpp"
#include "acsf/security.hpp"

namespace acsf {

inline constexpr std::array<std::uint8_t, 4> kMagic = {'A', 'C', 'S', 'F'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::uint8_t kFlagEncrypted = 0x01;
inline constexpr std::uint8_t kFlagForbidden = 0x02;
inline constexpr std::uint8_t kFlagSealed = 0x04;
inline constexpr std::uint8_t kKnownFlags = 0x07;
inline constexpr std::uint32_t kDefaultCdsCap = 4096;

/// One framed complete coding cycle.
struct CdsPayload {
    std::uint32_t uncompressed_len = 0;  // symbols in the cycle
    Bytes data;                          // terminated code bytes

    bool operator==(const CdsPayload&) const = default;
};

/// In-memory form of an "ACSF" file. Frequencies are stored in symbol
/// order, never permuted; an encrypted file's slot order exists only in
/// whoever holds the seed.
struct SealedFile {
    std::uint8_t flags = 0;
    std::vector<std::uint32_t> freqs;
    std::uint16_t forbidden_freq = 0;
    std::vector<CdsPayload> cds;
    std::optional<SealBlock> seal;

    bool encrypted() const noexcept { return flags & kFlagEncrypted; }
    bool has_forbidden() const noexcept { return flags & kFlagForbidden; }
    bool sealed() const noexcept { return flags & kFlagSealed; }

    bool operator==(const SealedFile&) const = default;
};

namespace wire {

inline void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u32(Bytes& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

/// Bounds-checked big-endian reader; any read past the end is TruncatedFile.
class Cursor {
public:
    explicit Cursor(ByteView data) : data_(data) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = std::uint16_t(data_[pos_]) << 8 | data_[pos_ + 1];
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 4;
        return v;
    }
    ByteView take(std::size_t n) {
        need(n);
        ByteView v = data_.subspan(pos_, n);
        pos_ += n;
        return v;
    }

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    bool done() const noexcept { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n)
            throw Error(Errc::truncated_file,
                        "need " + std::to_string(n) + " bytes, have " +
                            std::to_string(data_.size() - pos_));
    }

    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace wire

/// Model descriptor exactly as it appears on the wire. The same bytes go
/// into the seal digest (between nonce and tails), so a header edit breaks
/// the signature directly.
inline void append_model_descriptor(Bytes& out, std::span<const std::uint32_t> freqs,
                                    std::uint16_t forbidden_freq) {
    if (freqs.size() > 0xFFFF) throw Error(Errc::alphabet_too_large, "alphabet beyond u16");
    wire::put_u16(out, static_cast<std::uint16_t>(freqs.size()));
    for (std::uint32_t f : freqs) {
        if (f > 0xFFFF) throw Error(Errc::frequency_overflow, "frequency beyond u16");
        wire::put_u16(out, static_cast<std::uint16_t>(f));
    }
    wire::put_u16(out, forbidden_freq);
}

inline Bytes serialize(const SealedFile& f) {
    if (f.sealed() != f.seal.has_value())
        throw Error(Errc::malformed_seal, "seal flag and seal block disagree");
    Bytes out(kMagic.begin(), kMagic.end());
    out.push_back(kVersion);
    out.push_back(f.flags);
    append_model_descriptor(out, f.freqs, f.forbidden_freq);
    wire::put_u32(out, static_cast<std::uint32_t>(f.cds.size()));
    for (const CdsPayload& c : f.cds) {
        wire::put_u32(out, c.uncompressed_len);
        wire::put_u32(out, static_cast<std::uint32_t>(c.data.size()));
        out.insert(out.end(), c.data.begin(), c.data.end());
    }
    if (f.seal) {
        out.insert(out.end(), f.seal->nonce.begin(), f.seal->nonce.end());
        out.insert(out.end(), f.seal->signer_id.begin(), f.seal->signer_id.end());
        wire::put_u16(out, static_cast<std::uint16_t>(f.seal->signature.size()));
        out.insert(out.end(), f.seal->signature.begin(), f.seal->signature.end());
    }
    return out;
}

/// Total parser: arbitrary bytes in, SealedFile or a typed error out.
/// Structural checks only; semantic problems (zero freqs, undecodable
/// payloads) surface at decode time.
inline SealedFile parse_sealed(ByteView data) {
    wire::Cursor cur(data);
    auto magic = cur.take(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic.begin()))
        throw Error(Errc::bad_magic, "not an ACSF file");
    const std::uint8_t version = cur.u8();
    if (version != kVersion)
        throw Error(Errc::unsupported_version, "version " + std::to_string(version));
    SealedFile f;
    f.flags = cur.u8();
    if (f.flags & ~kKnownFlags)
        throw Error(Errc::unsupported_version, "unknown flag bits");
    const std::uint16_t n = cur.u16();
    f.freqs.resize(n);
    for (std::uint16_t i = 0; i < n; ++i) f.freqs[i] = cur.u16();
    f.forbidden_freq = cur.u16();
    const std::uint32_t cds_count = cur.u32();
    // Each CDS costs at least its 8-byte header; an impossible count is a
    // truncation, caught before any allocation sized by it.
    if (cds_count > cur.remaining() / 8)
        throw Error(Errc::truncated_file, "stream count exceeds file size");
    f.cds.resize(cds_count);
    for (std::uint32_t i = 0; i < cds_count; ++i) {
        f.cds[i].uncompressed_len = cur.u32();
        const std::uint32_t clen = cur.u32();
        auto payload = cur.take(clen);
        f.cds[i].data.assign(payload.begin(), payload.end());
    }
    if (f.sealed()) {
        SealBlock s;
        auto nonce = cur.take(kNonceBytes);
        std::copy(nonce.begin(), nonce.end(), s.nonce.begin());
        auto signer = cur.take(kSignerIdBytes);
        std::copy(signer.begin(), signer.end(), s.signer_id.begin());
        const std::uint16_t sig_len = cur.u16();
        auto sig = cur.take(sig_len);
        s.signature.assign(sig.begin(), sig.end());
        // The digest preimage length is implied by the header: nonce, model
        // descriptor, then one tail per stream.
        std::uint64_t tails = 0;
        for (const CdsPayload& c : f.cds)
            tails += c.uncompressed_len < kTailBytes ? c.uncompressed_len : kTailBytes;
        s.digest_input_len = kNonceBytes + 4 + 2ull * n + tails;
        f.seal = std::move(s);
    }
    if (!cur.done()) throw Error(Errc::length_mismatch, "trailing bytes after structure");
    return f;
}

struct EncodeParams {
    std::vector<std::uint32_t> freqs;
    std::uint16_t forbidden_freq = 0;
    std::optional<std::array<std::uint8_t, 32>> perm_seed;
    const SigningKey* signing_key = nullptr;
    std::optional<Nonce> nonce;  // fixed nonce for reproducibility; fresh if absent
    std::uint32_t cds_cap = kDefaultCdsCap;
};

namespace detail {

/// The model the coder actually runs: base freqs, forbidden band, then the
/// keyed permutation over the real slots.
inline SymbolModel coding_model(std::span<const std::uint32_t> freqs, std::uint16_t forbidden,
                                const std::optional<std::array<std::uint8_t, 32>>& seed) {
    SymbolModel m = add_forbidden(build_model(freqs), forbidden);
    if (seed) m = permute_model(m, derive_permutation(*seed, m.alphabet_size()));
    return m;
}

inline Bytes symbol_bytes(std::span<const Symbol> symbols) {
    Bytes out;
    out.reserve(symbols.size());
    for (Symbol s : symbols) out.push_back(static_cast<std::uint8_t>(s));
    return out;
}

/// Salvage decode of a dying stream: keep the recovered prefix, zero-fill
/// the rest of the declared length.
inline std::vector<Symbol> partial_then_zeros(const SymbolModel& m, const CdsPayload& c) {
    std::vector<Symbol> out;
    out.reserve(c.uncompressed_len);
    if (!c.data.empty()) {
        StreamDecoder dec(c.data);
        try {
            for (std::uint32_t k = 0; k < c.uncompressed_len; ++k) out.push_back(dec.decode(m));
        } catch (const Error&) {
        }
    }
    out.resize(c.uncompressed_len, Symbol{0});
    return out;
}

}  // namespace detail

inline SealedFile build_sealed(const EncodeParams& params, std::span<const Symbol> msg) {
    const std::uint32_t cap = params.cds_cap ? params.cds_cap : 1;
    SealedFile f;
    f.freqs = params.freqs;
    f.forbidden_freq = params.forbidden_freq;
    if (params.perm_seed) f.flags |= kFlagEncrypted;
    if (params.forbidden_freq) f.flags |= kFlagForbidden;

    const SymbolModel model =
        detail::coding_model(params.freqs, params.forbidden_freq, params.perm_seed);
    if (params.signing_key && model.alphabet_size() > 256)
        throw Error(Errc::alphabet_too_large, "sealing needs a byte alphabet");

    std::vector<CdsDescriptor> descs;
    for (std::size_t base = 0; base < msg.size(); base += cap) {
        const std::size_t len = std::min<std::size_t>(cap, msg.size() - base);
        auto chunk = msg.subspan(base, len);
        CdsPayload c;
        c.uncompressed_len = static_cast<std::uint32_t>(len);
        c.data = encode_stream(model, chunk);
        if (params.signing_key)
            descs.push_back(make_descriptor(static_cast<std::uint32_t>(descs.size()),
                                            detail::symbol_bytes(chunk),
                                            static_cast<std::uint32_t>(c.data.size())));
        f.cds.push_back(std::move(c));
    }

    if (params.signing_key) {
        f.flags |= kFlagSealed;
        Bytes message;
        append_model_descriptor(message, f.freqs, f.forbidden_freq);
        Bytes tails = gather_tails(descs);
        message.insert(message.end(), tails.begin(), tails.end());
        const Nonce nonce = params.nonce ? *params.nonce : make_nonce();
        f.seal = make_seal(*params.signing_key, nonce, message);
    }
    return f;
}

inline Bytes write_sealed(const EncodeParams& params, std::span<const Symbol> msg) {
    return serialize(build_sealed(params, msg));
}

struct DecodeOptions {
    std::optional<std::array<std::uint8_t, 32>> perm_seed;
    const VerifyKey* verify_key = nullptr;
    std::uint32_t max_cds_symbols = 1u << 26;
};

struct DecodeReport {
    std::vector<Symbol> symbols;
    Verdict verdict = Verdict::unsealed;
    std::optional<Errc> decode_error;
    std::optional<std::uint32_t> first_error_cds;
    std::optional<std::uint64_t> forbidden_hit_index;  // absolute symbol position
};

/// Decodes every stream and, for sealed files, re-gathers tails from the
/// decoded payload and checks the seal. Sealed decode is best-effort: a
/// stream that dies mid-way is zero-filled to its declared length so the
/// verifier still gets tails to disagree with. Unsealed decode propagates
/// the failure instead, there is nothing downstream to catch it.
inline DecodeReport decode_sealed(const SealedFile& f, const DecodeOptions& opt) {
    if (f.encrypted() && !opt.perm_seed)
        throw Error(Errc::key_required, "file is encrypted; supply the seed");
    if (f.sealed() && !opt.verify_key)
        throw Error(Errc::key_required, "file is sealed; supply the signer's public key");
    if (f.sealed() && f.freqs.size() > 256)
        throw Error(Errc::alphabet_too_large, "sealed file claims a non-byte alphabet");

    const SymbolModel model = detail::coding_model(f.freqs, f.forbidden_freq, opt.perm_seed);

    DecodeReport report;
    std::vector<CdsDescriptor> descs;
    std::uint64_t base = 0;
    for (std::uint32_t i = 0; i < f.cds.size(); ++i) {
        const CdsPayload& c = f.cds[i];
        if (c.uncompressed_len > opt.max_cds_symbols)
            throw Error(Errc::length_mismatch, "declared stream length exceeds decoder limit");
        std::vector<Symbol> symbols;
        try {
            symbols = decode_stream(model, c.data, c.uncompressed_len);
        } catch (const ForbiddenSymbolError& e) {
            if (!f.sealed()) throw ForbiddenSymbolError(base + e.symbol_index());
            if (!report.decode_error) {
                report.decode_error = Errc::forbidden_symbol_hit;
                report.first_error_cds = i;
                report.forbidden_hit_index = base + e.symbol_index();
            }
            symbols = detail::partial_then_zeros(model, c);
        } catch (const Error& e) {
            if (!f.sealed()) throw;
            if (!report.decode_error) {
                report.decode_error = e.code();
                report.first_error_cds = i;
            }
            symbols.assign(c.uncompressed_len, Symbol{0});
        }
        if (f.sealed())
            descs.push_back(make_descriptor(i, detail::symbol_bytes(symbols),
                                            static_cast<std::uint32_t>(c.data.size())));
        report.symbols.insert(report.symbols.end(), symbols.begin(), symbols.end());
        base += c.uncompressed_len;
    }

    if (f.sealed()) {
        Bytes message;
        append_model_descriptor(message, f.freqs, f.forbidden_freq);
        Bytes tails = gather_tails(descs);
        message.insert(message.end(), tails.begin(), tails.end());
        report.verdict = check_seal(*opt.verify_key, *f.seal, message);
    }
    return report;
}

}  // namespace acsf
