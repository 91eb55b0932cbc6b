#pragma once

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/ecdsa.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>
#include <openssl/pem.h>
#include <openssl/rand.h>
#include <openssl/x509.h>

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "acsf/bytes.hpp"
#include "acsf/errors.hpp"
#include "acsf/hash.hpp"

namespace acsf {

inline constexpr std::size_t kTailBytes = 16;
inline constexpr std::size_t kNonceBytes = 16;
inline constexpr std::size_t kSignerIdBytes = 8;
inline constexpr std::size_t kSignatureBytes = 64;  // raw r || s, 32 each

using Nonce = std::array<std::uint8_t, kNonceBytes>;
using SignerId = std::array<std::uint8_t, kSignerIdBytes>;

enum class Verdict {
    authentic,
    tampered,
    unknown_signer,
    unsealed,
};

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::authentic: return "authentic";
        case Verdict::tampered: return "tampered";
        case Verdict::unknown_signer: return "unknown-signer";
        case Verdict::unsealed: return "unsealed";
    }
    return "?";
}

/// Summary of one complete coding cycle, kept for sealing.
struct CdsDescriptor {
    std::uint32_t index = 0;
    std::uint32_t uncompressed_len = 0;
    std::uint32_t compressed_len = 0;
    Bytes tail;  // last min(16, len) bytes of the uncompressed stream
};

inline CdsDescriptor make_descriptor(std::uint32_t index, ByteView uncompressed,
                                     std::uint32_t compressed_len) {
    CdsDescriptor d;
    d.index = index;
    d.uncompressed_len = static_cast<std::uint32_t>(uncompressed.size());
    d.compressed_len = compressed_len;
    const std::size_t take = uncompressed.size() < kTailBytes ? uncompressed.size() : kTailBytes;
    d.tail.assign(uncompressed.end() - take, uncompressed.end());
    return d;
}

/// Concatenated stream tails in index order: the cheap-to-hash stand-in for
/// the whole payload.
inline Bytes gather_tails(std::span<const CdsDescriptor> streams) {
    if (streams.empty()) throw Error(Errc::empty_cds_list, "nothing to gather");
    Bytes out;
    for (const CdsDescriptor& d : streams) out.insert(out.end(), d.tail.begin(), d.tail.end());
    if (out.empty()) throw Error(Errc::empty_cds_list, "streams carry no bytes");
    return out;
}

inline Nonce make_nonce() {
    Nonce n;
    if (RAND_bytes(n.data(), static_cast<int>(n.size())) != 1)
        throw Error(Errc::entropy_unavailable, "RAND_bytes failed");
    return n;
}

namespace detail {

struct OsslFree {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
    void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
    void operator()(BIGNUM* p) const { BN_clear_free(p); }
    void operator()(BN_CTX* p) const { BN_CTX_free(p); }
    void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
    void operator()(EC_POINT* p) const { EC_POINT_free(p); }
    void operator()(BIO* p) const { BIO_free(p); }
    void operator()(ECDSA_SIG* p) const { ECDSA_SIG_free(p); }
    void operator()(OSSL_PARAM_BLD* p) const { OSSL_PARAM_BLD_free(p); }
    void operator()(OSSL_PARAM* p) const { OSSL_PARAM_free(p); }
};
template <typename T>
using OsslPtr = std::unique_ptr<T, OsslFree>;

inline const EC_GROUP* p256_group() {
    static OsslPtr<EC_GROUP> g(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1));
    return g.get();
}

inline const BIGNUM* p256_order() { return EC_GROUP_get0_order(p256_group()); }

/// Deterministic nonce generator per RFC 6979, instantiated with HMAC-SHA224
/// to match the seal digest. Yields 256-bit candidates for the P-256 order.
class DeterministicNonce {
public:
    DeterministicNonce(const std::array<std::uint8_t, 32>& priv_octets, const Digest224& h1) {
        v_.assign(28, 0x01);
        k_.assign(28, 0x00);
        // bits2octets(h1): h1 read as an integer is below the group order
        // (224 < 256 bits), so it reduces to itself, left-padded to 32 bytes.
        std::array<std::uint8_t, 32> h_octets{};
        std::copy(h1.begin(), h1.end(), h_octets.begin() + 4);
        step(0x00, priv_octets, h_octets);
        step(0x01, priv_octets, h_octets);
    }

    std::array<std::uint8_t, 32> next() {
        if (!first_) {
            Bytes msg(v_);
            msg.push_back(0x00);
            assign(k_, hmac_sha224(k_, msg));
            assign(v_, hmac_sha224(k_, v_));
        }
        first_ = false;
        Bytes t;
        while (t.size() < 32) {
            assign(v_, hmac_sha224(k_, v_));
            t.insert(t.end(), v_.begin(), v_.end());
        }
        std::array<std::uint8_t, 32> out;
        std::copy(t.begin(), t.begin() + 32, out.begin());
        return out;
    }

private:
    void step(std::uint8_t tag, const std::array<std::uint8_t, 32>& d,
              const std::array<std::uint8_t, 32>& h) {
        Bytes msg(v_);
        msg.push_back(tag);
        msg.insert(msg.end(), d.begin(), d.end());
        msg.insert(msg.end(), h.begin(), h.end());
        assign(k_, hmac_sha224(k_, msg));
        assign(v_, hmac_sha224(k_, v_));
    }

    static void assign(Bytes& dst, const Digest224& src) { dst.assign(src.begin(), src.end()); }

    Bytes v_;
    Bytes k_;
    bool first_ = true;
};

inline std::array<std::uint8_t, 64> ecdsa_sign_p256(const BIGNUM* priv, const Digest224& h1) {
    const EC_GROUP* group = p256_group();
    const BIGNUM* order = p256_order();
    OsslPtr<BN_CTX> ctx(BN_CTX_new());

    std::array<std::uint8_t, 32> priv_octets{};
    BN_bn2binpad(priv, priv_octets.data(), 32);
    OsslPtr<BIGNUM> e(BN_bin2bn(h1.data(), static_cast<int>(h1.size()), nullptr));

    DeterministicNonce gen(priv_octets, h1);
    OsslPtr<BIGNUM> r(BN_new()), s(BN_new()), x(BN_new()), tmp(BN_new());
    for (;;) {
        auto kb = gen.next();
        OsslPtr<BIGNUM> k(BN_bin2bn(kb.data(), 32, nullptr));
        if (BN_is_zero(k.get()) || BN_cmp(k.get(), order) >= 0) continue;

        OsslPtr<EC_POINT> R(EC_POINT_new(group));
        if (EC_POINT_mul(group, R.get(), k.get(), nullptr, nullptr, ctx.get()) != 1)
            throw Error(Errc::key_invalid, "point multiply failed");
        EC_POINT_get_affine_coordinates(group, R.get(), x.get(), nullptr, ctx.get());
        BN_nnmod(r.get(), x.get(), order, ctx.get());
        if (BN_is_zero(r.get())) continue;

        OsslPtr<BIGNUM> kinv(BN_mod_inverse(nullptr, k.get(), order, ctx.get()));
        BN_mod_mul(tmp.get(), r.get(), priv, order, ctx.get());
        BN_mod_add(tmp.get(), tmp.get(), e.get(), order, ctx.get());
        BN_mod_mul(s.get(), kinv.get(), tmp.get(), order, ctx.get());
        if (BN_is_zero(s.get())) continue;

        std::array<std::uint8_t, 64> sig{};
        BN_bn2binpad(r.get(), sig.data(), 32);
        BN_bn2binpad(s.get(), sig.data() + 32, 32);
        return sig;
    }
}

inline SignerId signer_id_of(EVP_PKEY* pkey) {
    unsigned char* der = nullptr;
    int len = i2d_PUBKEY(pkey, &der);
    if (len <= 0) throw Error(Errc::key_invalid, "public key not encodable");
    Digest256 d = sha256(ByteView(der, static_cast<std::size_t>(len)));
    OPENSSL_free(der);
    SignerId id;
    std::copy(d.begin(), d.begin() + kSignerIdBytes, id.begin());
    return id;
}

inline std::string pem_from_bio(BIO* bio) {
    BUF_MEM* mem = nullptr;
    BIO_get_mem_ptr(bio, &mem);
    return std::string(mem->data, mem->length);
}

inline bool verify_raw_sig(EVP_PKEY* pkey, const Digest224& digest, ByteView sig64) {
    OsslPtr<ECDSA_SIG> es(ECDSA_SIG_new());
    BIGNUM* r = BN_bin2bn(sig64.data(), 32, nullptr);
    BIGNUM* sv = BN_bin2bn(sig64.data() + 32, 32, nullptr);
    ECDSA_SIG_set0(es.get(), r, sv);  // sig owns r, sv now
    unsigned char* der = nullptr;
    int der_len = i2d_ECDSA_SIG(es.get(), &der);
    if (der_len <= 0) return false;

    OsslPtr<EVP_PKEY_CTX> ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, pkey, nullptr));
    bool ok = ctx && EVP_PKEY_verify_init(ctx.get()) == 1 &&
              EVP_PKEY_verify(ctx.get(), der, static_cast<std::size_t>(der_len), digest.data(),
                              digest.size()) == 1;
    OPENSSL_free(der);
    return ok;
}

}  // namespace detail

/// Verification half of a signing pair.
class VerifyKey {
public:
    static VerifyKey load_pem(const std::string& pem) {
        detail::OsslPtr<BIO> bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
        EVP_PKEY* raw = PEM_read_bio_PUBKEY(bio.get(), nullptr, nullptr, nullptr);
        if (!raw) throw Error(Errc::key_invalid, "not a PEM public key");
        VerifyKey k;
        k.pkey_.reset(raw);
        k.require_p256();
        return k;
    }

    std::string save_pem() const {
        detail::OsslPtr<BIO> bio(BIO_new(BIO_s_mem()));
        PEM_write_bio_PUBKEY(bio.get(), pkey_.get());
        return detail::pem_from_bio(bio.get());
    }

    SignerId signer_id() const { return detail::signer_id_of(pkey_.get()); }

    bool verify_digest(const Digest224& digest, ByteView sig64) const {
        if (sig64.size() != kSignatureBytes)
            throw Error(Errc::malformed_seal, "signature must be 64 bytes");
        return detail::verify_raw_sig(pkey_.get(), digest, sig64);
    }

private:
    friend class SigningKey;
    void require_p256() const {
        char name[32] = {0};
        std::size_t got = 0;
        if (!EVP_PKEY_is_a(pkey_.get(), "EC") ||
            EVP_PKEY_get_utf8_string_param(pkey_.get(), OSSL_PKEY_PARAM_GROUP_NAME, name,
                                           sizeof(name), &got) != 1 ||
            (std::string(name) != "prime256v1" && std::string(name) != "P-256"))
            throw Error(Errc::key_invalid, "expected a P-256 key");
    }

    detail::OsslPtr<EVP_PKEY> pkey_;
};

/// P-256 signing key; signatures are deterministic in (key, digest).
class SigningKey {
public:
    static SigningKey generate() {
        EVP_PKEY* raw = EVP_PKEY_Q_keygen(nullptr, nullptr, "EC", "P-256");
        if (!raw) throw Error(Errc::entropy_unavailable, "keygen failed");
        SigningKey k;
        k.pkey_.reset(raw);
        return k;
    }

    /// Builds the pair from a raw 32-byte scalar (public point recomputed).
    static SigningKey from_private_scalar(const std::array<std::uint8_t, 32>& scalar) {
        using namespace detail;
        OsslPtr<BIGNUM> d(BN_bin2bn(scalar.data(), 32, nullptr));
        if (BN_is_zero(d.get()) || BN_cmp(d.get(), p256_order()) >= 0)
            throw Error(Errc::key_invalid, "scalar outside [1, n-1]");

        OsslPtr<BN_CTX> ctx(BN_CTX_new());
        OsslPtr<EC_POINT> pub(EC_POINT_new(p256_group()));
        if (EC_POINT_mul(p256_group(), pub.get(), d.get(), nullptr, nullptr, ctx.get()) != 1)
            throw Error(Errc::key_invalid, "point multiply failed");
        std::size_t pub_len = EC_POINT_point2oct(p256_group(), pub.get(),
                                                 POINT_CONVERSION_UNCOMPRESSED, nullptr, 0,
                                                 ctx.get());
        Bytes pub_oct(pub_len);
        EC_POINT_point2oct(p256_group(), pub.get(), POINT_CONVERSION_UNCOMPRESSED, pub_oct.data(),
                           pub_len, ctx.get());

        OsslPtr<OSSL_PARAM_BLD> bld(OSSL_PARAM_BLD_new());
        OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0);
        OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, d.get());
        OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub_oct.data(),
                                         pub_oct.size());
        OsslPtr<OSSL_PARAM> params(OSSL_PARAM_BLD_to_param(bld.get()));

        OsslPtr<EVP_PKEY_CTX> pctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
        EVP_PKEY* raw = nullptr;
        if (EVP_PKEY_fromdata_init(pctx.get()) != 1 ||
            EVP_PKEY_fromdata(pctx.get(), &raw, EVP_PKEY_KEYPAIR, params.get()) != 1)
            throw Error(Errc::key_invalid, "key assembly failed");
        SigningKey k;
        k.pkey_.reset(raw);
        return k;
    }

    static SigningKey load_pem(const std::string& pem) {
        detail::OsslPtr<BIO> bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
        EVP_PKEY* raw = PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr);
        if (!raw) throw Error(Errc::key_invalid, "not a PEM private key");
        SigningKey k;
        k.pkey_.reset(raw);
        if (!EVP_PKEY_is_a(k.pkey_.get(), "EC"))
            throw Error(Errc::key_invalid, "expected a P-256 key");
        return k;
    }

    std::string save_pem() const {
        detail::OsslPtr<BIO> bio(BIO_new(BIO_s_mem()));
        PEM_write_bio_PrivateKey(bio.get(), pkey_.get(), nullptr, nullptr, 0, nullptr, nullptr);
        return detail::pem_from_bio(bio.get());
    }

    VerifyKey verify_key() const {
        EVP_PKEY_up_ref(pkey_.get());
        VerifyKey v;
        v.pkey_.reset(pkey_.get());
        return v;
    }

    SignerId signer_id() const { return detail::signer_id_of(pkey_.get()); }

    std::array<std::uint8_t, 64> sign_digest(const Digest224& digest) const {
        BIGNUM* raw = nullptr;
        if (EVP_PKEY_get_bn_param(pkey_.get(), OSSL_PKEY_PARAM_PRIV_KEY, &raw) != 1)
            throw Error(Errc::key_invalid, "private scalar unavailable");
        detail::OsslPtr<BIGNUM> d(raw);
        return detail::ecdsa_sign_p256(d.get(), digest);
    }

private:
    detail::OsslPtr<EVP_PKEY> pkey_;
};

inline constexpr const char* kHashAlg = "SHA-224";
inline constexpr const char* kSigAlg = "ECDSA-P256";

/// Nonce, signer fingerprint and signature as carried in a sealed file.
/// Algorithm identifiers travel with the block so a future scheme can swap
/// in; only the pair above is currently accepted.
struct SealBlock {
    Nonce nonce{};
    SignerId signer_id{};
    Bytes signature;
    std::uint64_t digest_input_len = 0;
    std::string hash_alg = kHashAlg;
    std::string sig_alg = kSigAlg;

    bool operator==(const SealBlock&) const = default;
};

inline Digest224 seal_digest(const Nonce& nonce, ByteView message) {
    Bytes buf(nonce.begin(), nonce.end());
    buf.insert(buf.end(), message.begin(), message.end());
    return sha224(buf);
}

inline SealBlock make_seal(const SigningKey& key, const Nonce& nonce, ByteView message) {
    SealBlock s;
    s.nonce = nonce;
    s.signer_id = key.signer_id();
    s.digest_input_len = kNonceBytes + message.size();
    auto sig = key.sign_digest(seal_digest(nonce, message));
    s.signature.assign(sig.begin(), sig.end());
    return s;
}

inline Verdict check_seal(const VerifyKey& key, const SealBlock& seal, ByteView message) {
    if (seal.hash_alg != kHashAlg || seal.sig_alg != kSigAlg)
        throw Error(Errc::malformed_seal, "unsupported seal algorithms");
    if (seal.signature.size() != kSignatureBytes)
        throw Error(Errc::malformed_seal, "signature must be 64 bytes");
    if (key.signer_id() != seal.signer_id) return Verdict::unknown_signer;
    return key.verify_digest(seal_digest(seal.nonce, message), seal.signature)
               ? Verdict::authentic
               : Verdict::tampered;
}

}  // namespace acsf
