#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "acsf/security.hpp"
#include "test_support.hpp"

using namespace acsf;

namespace {

Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }

// key from a published deterministic-signature test suite, usable as a
// cross-implementation check
SigningKey reference_key() {
    std::array<std::uint8_t, 32> scalar = {
        0xC9, 0xAF, 0xA9, 0xD8, 0x45, 0xBA, 0x75, 0x16, 0x6B, 0x5C, 0x21, 0x57, 0x67, 0xB1,
        0xD6, 0x93, 0x4E, 0x50, 0xC3, 0xDB, 0x36, 0xE8, 0x9B, 0x12, 0x7B, 0x8A, 0x62, 0x2B,
        0x12, 0x0F, 0x67, 0x21};
    return SigningKey::from_private_scalar(scalar);
}

std::string hex(ByteView v) { return to_hex(v); }
template <std::size_t N>
std::string hex(const std::array<std::uint8_t, N>& a) {
    return to_hex(ByteView(a.data(), a.size()));
}

}  // namespace

TEST_CASE("hash known answers", "[security]") {
    CHECK(hex(sha224(bytes_of("abc"))) ==
          "23097d223405d8228642a477bda255b32aadbce4bda0b3f7e36c9da7");
    CHECK(hex(sha224(Bytes{})) ==
          "d14a028c2a3a2bc9476102bb288234c415a2b01f828ea62ac5b3e42f");
    CHECK(hex(sha256(bytes_of("abc"))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    Bytes key(20, 0x0b);
    CHECK(hex(hmac_sha224(key, bytes_of("Hi There"))) ==
          "896fb1128abbdf196832107cd49df33f47b4b1169912ba4f53684b22");
}

TEST_CASE("deterministic signature matches the published vector", "[security]") {
    SigningKey key = reference_key();
    auto sig = key.sign_digest(sha224(bytes_of("sample")));
    CHECK(hex(sig) ==
          "53b2fff5d1752b2c689df257c04c40a587fababb3f6fc2702f1343af7ca9aa3f"
          "b9afb64fdc03dc1a131c7d2386d11e349f070aa432a4acc918bea988bf75c74c");
    CHECK(key.verify_key().verify_digest(sha224(bytes_of("sample")),
                                         ByteView(sig.data(), sig.size())));
}

TEST_CASE("frozen seal vector", "[security]") {
    SigningKey key = reference_key();
    Nonce nonce{};
    for (int i = 0; i < 16; ++i) nonce[i] = static_cast<std::uint8_t>(i);
    Bytes gathered;
    for (int rep = 0; rep < 4; ++rep)
        for (char c : std::string("ABDCDCBCDD")) gathered.push_back(std::uint8_t(c));
    gathered.resize(48, 0);

    CHECK(hex(seal_digest(nonce, gathered)) ==
          "df2dfcaad51bf6c57333873ebd8c2a242878609ceb332ccf7ebed107");
    SealBlock seal = make_seal(key, nonce, gathered);
    CHECK(hex(ByteView(seal.signature.data(), seal.signature.size())) ==
          "cd80e30e99d28b839f9e18a411dfe866211cd8394949731440158c3df2e653ae"
          "1fa74fbc7ff54ca81042699af6ea123d4c00d52104aad126f3becbc72ebdb780");
    CHECK(seal.digest_input_len == 16 + 48);
    CHECK(check_seal(key.verify_key(), seal, gathered) == Verdict::authentic);
}

TEST_CASE("sealing is deterministic in key, nonce and message", "[security]") {
    SigningKey key = reference_key();
    Nonce nonce{};
    nonce.fill(0x5A);
    Bytes msg = bytes_of("the same message");
    SealBlock a = make_seal(key, nonce, msg);
    SealBlock b = make_seal(key, nonce, msg);
    CHECK(a == b);
}

TEST_CASE("seal verdicts", "[security]") {
    SigningKey key = SigningKey::generate();
    VerifyKey pub = key.verify_key();
    Nonce nonce = make_nonce();
    Bytes msg = bytes_of("gathered tails go here");
    SealBlock seal = make_seal(key, nonce, msg);

    CHECK(check_seal(pub, seal, msg) == Verdict::authentic);

    Bytes other = msg;
    other[3] ^= 1;
    CHECK(check_seal(pub, seal, other) == Verdict::tampered);

    SealBlock bad_sig = seal;
    bad_sig.signature[10] ^= 0x80;
    CHECK(check_seal(pub, bad_sig, msg) == Verdict::tampered);

    SigningKey stranger = SigningKey::generate();
    CHECK(check_seal(stranger.verify_key(), seal, msg) == Verdict::unknown_signer);

    SealBlock short_sig = seal;
    short_sig.signature.resize(63);
    CHECK_THROWS_MATCHES(check_seal(pub, short_sig, msg), Error,
                         ErrorMatcher(Errc::malformed_seal));

    SealBlock alien = seal;
    alien.sig_alg = "something-else";
    CHECK_THROWS_MATCHES(check_seal(pub, alien, msg), Error,
                         ErrorMatcher(Errc::malformed_seal));
}

TEST_CASE("identical zero tails under different nonces digest differently", "[security]") {
    Bytes zero_tails(32, 0x00);
    Nonce n1{}, n2{};
    n2[15] = 1;
    CHECK(seal_digest(n1, zero_tails) != seal_digest(n2, zero_tails));
}

TEST_CASE("nonce stream has no short-range collisions", "[security]") {
    std::set<Nonce> seen;
    for (int i = 0; i < 10000; ++i) CHECK(seen.insert(make_nonce()).second);
}

TEST_CASE("tail extraction keeps the last sixteen bytes", "[security]") {
    Bytes shorty = bytes_of("abc");
    CdsDescriptor d1 = make_descriptor(0, shorty, 2);
    CHECK(d1.tail == shorty);
    CHECK(d1.uncompressed_len == 3);
    CHECK(d1.compressed_len == 2);

    Bytes longer;
    for (int i = 0; i < 40; ++i) longer.push_back(static_cast<std::uint8_t>(i));
    CdsDescriptor d2 = make_descriptor(1, longer, 10);
    REQUIRE(d2.tail.size() == kTailBytes);
    CHECK(d2.tail.front() == 24);
    CHECK(d2.tail.back() == 39);
}

TEST_CASE("tails concatenate in stream order", "[security]") {
    std::vector<CdsDescriptor> descs;
    descs.push_back(make_descriptor(0, bytes_of("onestream"), 4));
    descs.push_back(make_descriptor(1, bytes_of("two"), 2));
    Bytes gathered = gather_tails(descs);
    CHECK(gathered == bytes_of("onestreamtwo"));

    CHECK_THROWS_MATCHES(gather_tails(std::vector<CdsDescriptor>{}), Error,
                         ErrorMatcher(Errc::empty_cds_list));
    std::vector<CdsDescriptor> hollow(2);
    CHECK_THROWS_MATCHES(gather_tails(hollow), Error, ErrorMatcher(Errc::empty_cds_list));
}

TEST_CASE("PEM roundtrip preserves signing behaviour", "[security]") {
    SigningKey key = SigningKey::generate();
    SigningKey reloaded = SigningKey::load_pem(key.save_pem());
    CHECK(reloaded.signer_id() == key.signer_id());
    Digest224 d = sha224(bytes_of("payload"));
    CHECK(reloaded.sign_digest(d) == key.sign_digest(d));

    VerifyKey pub = VerifyKey::load_pem(key.verify_key().save_pem());
    CHECK(pub.signer_id() == key.signer_id());
    auto sig = key.sign_digest(d);
    CHECK(pub.verify_digest(d, ByteView(sig.data(), sig.size())));

    CHECK_THROWS_MATCHES(SigningKey::load_pem("not a pem"), Error,
                         ErrorMatcher(Errc::key_invalid));
    CHECK_THROWS_MATCHES(VerifyKey::load_pem("not a pem"), Error,
                         ErrorMatcher(Errc::key_invalid));
}

TEST_CASE("private scalar bounds are enforced", "[security]") {
    std::array<std::uint8_t, 32> zero{};
    CHECK_THROWS_MATCHES(SigningKey::from_private_scalar(zero), Error,
                         ErrorMatcher(Errc::key_invalid));
    std::array<std::uint8_t, 32> huge{};
    huge.fill(0xFF);  // above the group order
    CHECK_THROWS_MATCHES(SigningKey::from_private_scalar(huge), Error,
                         ErrorMatcher(Errc::key_invalid));
}

TEST_CASE("generated keys are distinct and self-consistent", "[security]") {
    SigningKey a = SigningKey::generate();
    SigningKey b = SigningKey::generate();
    CHECK(a.signer_id() != b.signer_id());

    Digest224 d = sha224(bytes_of("x"));
    auto sig = a.sign_digest(d);
    CHECK(a.verify_key().verify_digest(d, ByteView(sig.data(), sig.size())));
    CHECK_FALSE(b.verify_key().verify_digest(d, ByteView(sig.data(), sig.size())));

    Digest224 d2 = sha224(bytes_of("y"));
    CHECK_FALSE(a.verify_key().verify_digest(d2, ByteView(sig.data(), sig.size())));

    Bytes stub(10, 1);
    CHECK_THROWS_MATCHES(a.verify_key().verify_digest(d, stub), Error,
                         ErrorMatcher(Errc::malformed_seal));
}
