#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acsf {

enum class Errc {
    empty_alphabet,
    zero_frequency,
    frequency_overflow,
    alphabet_too_large,
    key_size_mismatch,
    key_required,
    key_invalid,
    slot_out_of_range,
    symbol_out_of_range,
    zero_width,
    forbidden_symbol_hit,
    unexpected_end_of_data,
    empty_cds_list,
    entropy_unavailable,
    malformed_seal,
    bad_magic,
    unsupported_version,
    truncated_file,
    length_mismatch,
    epsilon_unrepresentable,
};

inline const char* errc_name(Errc c) noexcept {
    switch (c) {
        case Errc::empty_alphabet: return "empty_alphabet";
        case Errc::zero_frequency: return "zero_frequency";
        case Errc::frequency_overflow: return "frequency_overflow";
        case Errc::alphabet_too_large: return "alphabet_too_large";
        case Errc::key_size_mismatch: return "key_size_mismatch";
        case Errc::key_required: return "key_required";
        case Errc::key_invalid: return "key_invalid";
        case Errc::slot_out_of_range: return "slot_out_of_range";
        case Errc::symbol_out_of_range: return "symbol_out_of_range";
        case Errc::zero_width: return "zero_width";
        case Errc::forbidden_symbol_hit: return "forbidden_symbol_hit";
        case Errc::unexpected_end_of_data: return "unexpected_end_of_data";
        case Errc::empty_cds_list: return "empty_cds_list";
        case Errc::entropy_unavailable: return "entropy_unavailable";
        case Errc::malformed_seal: return "malformed_seal";
        case Errc::bad_magic: return "bad_magic";
        case Errc::unsupported_version: return "unsupported_version";
        case Errc::truncated_file: return "truncated_file";
        case Errc::length_mismatch: return "length_mismatch";
        case Errc::epsilon_unrepresentable: return "epsilon_unrepresentable";
    }
    return "unknown";
}

/// Library-wide exception type; every typed failure carries an Errc.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Decoder walked into the forbidden slot; carries how many symbols were
/// already recovered before the hit.
class ForbiddenSymbolError : public Error {
public:
    explicit ForbiddenSymbolError(std::size_t symbol_index)
        : Error(Errc::forbidden_symbol_hit,
                "forbidden region entered at symbol " + std::to_string(symbol_index)),
          symbol_index_(symbol_index) {}

    std::size_t symbol_index() const noexcept { return symbol_index_; }

private:
    std::size_t symbol_index_;
};

}  // namespace acsf
