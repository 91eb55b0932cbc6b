#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "acsf/coder.hpp"
#include "acsf/errors.hpp"
#include "acsf/exact.hpp"
#include "acsf/hash.hpp"
#include "acsf/model.hpp"
#include "acsf/security.hpp"

namespace acsf {

namespace detail {

/// splitmix64; self-contained so experiment streams are identical on every
/// platform, which std::uniform_int_distribution does not promise.
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t residue = (std::uint64_t(0) - bound) % bound;
        const std::uint64_t limit = std::uint64_t(0) - residue;
        std::uint64_t v;
        do {
            v = next();
        } while (limit != 0 && v >= limit);
        return v % bound;
    }
};

inline std::uint64_t trial_seed(std::uint64_t experiment_seed, std::uint64_t trial) {
    SplitMix64 g{experiment_seed ^ (0x9E3779B97F4A7C15ull * (trial + 1))};
    return g.next();
}

/// Draws symbols i.i.d. from the model's real-slot distribution.
inline std::vector<Symbol> random_message(const SymbolModel& m, std::size_t len, SplitMix64& rng) {
    const std::uint64_t real_total = m.total() - m.forbidden_freq();
    std::vector<Symbol> msg(len);
    for (std::size_t i = 0; i < len; ++i)
        msg[i] = m.symbol_of_slot(m.find_slot(static_cast<std::uint32_t>(rng.below(real_total))));
    return msg;
}

inline std::uint64_t encoded_bits(const SymbolModel& m, std::span<const Symbol> msg) {
    StreamEncoder enc;
    for (Symbol s : msg) enc.encode(m, s);
    enc.flush();
    return enc.bit_count();
}

}  // namespace detail

// ---------------------------------------------------------------- redundancy

struct RedundancyReport {
    double epsilon = 0;           // requested
    double epsilon_achieved = 0;  // forbidden_freq / model_total
    std::uint32_t forbidden_freq = 0;
    std::uint32_t model_total = 0;
    std::uint32_t n_symbols = 0;
    std::uint32_t trials = 0;
    double predicted_extra_bits = 0;           // n * -log2(1 - epsilon)
    double predicted_extra_bits_achieved = 0;  // same at the achieved ratio
    double measured_extra_bits = 0;            // mean over trials
    double measured_stddev = 0;
    std::vector<double> per_trial;
};

inline double redundancy_per_symbol(double epsilon) { return -std::log2(1.0 - epsilon); }

/// Fits a forbidden width onto the base model so forbidden/total matches
/// epsilon, then measures code growth block by block against the plain
/// model on the same random blocks.
inline RedundancyReport run_redundancy(const SymbolModel& base, double epsilon,
                                       std::uint32_t n_symbols, std::uint32_t trials,
                                       std::uint64_t seed = 1) {
    if (base.has_forbidden())
        throw Error(Errc::epsilon_unrepresentable, "base model already has a forbidden band");
    if (!(epsilon >= 0.0) || epsilon >= 1.0)
        throw Error(Errc::epsilon_unrepresentable, "epsilon outside [0, 1)");

    const double t = base.total();
    std::uint32_t ff = 0;
    if (epsilon > 0.0) {
        ff = static_cast<std::uint32_t>(std::llround(epsilon * t / (1.0 - epsilon)));
        if (ff == 0) ff = 1;
        if (std::uint64_t(base.total()) + ff > kMaxTotalFreq)
            throw Error(Errc::epsilon_unrepresentable, "no headroom for the forbidden band");
        const double achieved = double(ff) / (t + ff);
        if (std::abs(achieved - epsilon) / epsilon > 0.05)
            throw Error(Errc::epsilon_unrepresentable,
                        "nearest achievable ratio is off by more than 5%");
    }
    const SymbolModel with_ff = add_forbidden(base, ff);

    RedundancyReport r;
    r.epsilon = epsilon;
    r.epsilon_achieved = ff ? double(ff) / with_ff.total() : 0.0;
    r.forbidden_freq = ff;
    r.model_total = with_ff.total();
    r.n_symbols = n_symbols;
    r.trials = trials;
    r.predicted_extra_bits = n_symbols * redundancy_per_symbol(epsilon);
    r.predicted_extra_bits_achieved = n_symbols * redundancy_per_symbol(r.epsilon_achieved);

    double sum = 0, sumsq = 0;
    r.per_trial.reserve(trials);
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
        detail::SplitMix64 rng{detail::trial_seed(seed, trial)};
        auto msg = detail::random_message(base, n_symbols, rng);
        const double extra = double(detail::encoded_bits(with_ff, msg)) -
                             double(detail::encoded_bits(base, msg));
        r.per_trial.push_back(extra);
        sum += extra;
        sumsq += extra * extra;
    }
    if (trials) {
        r.measured_extra_bits = sum / trials;
        const double var = sumsq / trials - r.measured_extra_bits * r.measured_extra_bits;
        r.measured_stddev = var > 0 ? std::sqrt(var) : 0.0;
    }
    return r;
}

// ----------------------------------------------------------------- expansion

struct ExpansionRow {
    std::string label;
    BigRational width_reference;  // exact interval width under the honest model
    BigRational width_mapped;     // width under the remapped model
    BigRational ratio;            // reference / mapped
    std::int64_t extra_bits = 0;  // width_bits(mapped) - width_bits(reference)
};

struct ExpansionReport {
    std::vector<ExpansionRow> rows;
};

/// Exact-coder contrast between the two ways of rebinding symbols to slots:
/// swapping labels under fixed widths (costs bits) versus moving width and
/// label together (free).
inline ExpansionReport run_expansion_counterexample() {
    const SymbolModel m = build_model({1, 2, 3, 4});
    // A=0 B=1 C=2 D=3
    const std::vector<Symbol> msg = {0, 1, 3, 2, 3, 2, 1, 2, 3, 3};  // ABDCDCBCDD
    const std::vector<Symbol> balanced = {0, 0, 3, 3};               // AADD

    auto row = [](std::string label, const SymbolModel& ref_model, const SymbolModel& mapped_model,
                  std::span<const Symbol> message) {
        ExpansionRow r;
        r.label = std::move(label);
        r.width_reference = exact_encode(ref_model, message).width();
        r.width_mapped = exact_encode(mapped_model, message).width();
        r.ratio = r.width_reference / r.width_mapped;
        r.extra_bits = std::int64_t(width_bits(r.width_mapped)) -
                       std::int64_t(width_bits(r.width_reference));
        return r;
    };

    ExpansionReport report;
    report.rows.push_back(
        row("naive-swap-A-D", m, naive_swap_model(m, 0, 3), msg));
    std::array<std::uint8_t, 32> seed{};
    seed[31] = 7;
    report.rows.push_back(row("keyed-permutation", m,
                              permute_model(m, derive_permutation(seed, m.alphabet_size())), msg));
    report.rows.push_back(
        row("naive-swap-balanced-counts", m, naive_swap_model(m, 0, 3), balanced));
    return report;
}

// ----------------------------------------------------------------- avalanche

struct AvalancheReport {
    double position_fraction = 0;       // where in the usable bits the flip lands
    double flip_bit_position = 0;       // mean absolute bit index across trials
    double first_corrupted_symbol_index = 0;  // mean; n_symbols when nothing changed
    double frac_first_is_zero = 0;      // trials whose corruption starts at symbol 0
    double symbol_error_rate = 0;       // mismatches past the intact prefix, pooled
    std::uint32_t trials = 0;
    std::uint32_t prefix_violations = 0;  // corruption inside the pre-flip prefix; must be 0
};

/// Flips one bit per trial at fixed fractional positions of the usable code
/// bits and compares the damaged decode against the original. The intact
/// prefix is computed from the clean decode's bit trace, which makes the
/// "symbols before the flip survive" claim an exact per-trial check.
inline std::vector<AvalancheReport> run_avalanche(const SymbolModel& model, std::uint32_t msg_len,
                                                  std::uint32_t trials, std::uint64_t seed = 1) {
    const std::vector<double> fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
    struct Acc {
        double flip_sum = 0, first_sum = 0;
        std::uint64_t zero_first = 0, mism = 0, post = 0;
        std::uint32_t violations = 0;
    };
    std::vector<Acc> acc(fractions.size());

    for (std::uint32_t trial = 0; trial < trials; ++trial) {
        detail::SplitMix64 rng{detail::trial_seed(seed, trial)};
        auto msg = detail::random_message(model, msg_len, rng);
        StreamEncoder enc;
        for (Symbol s : msg) enc.encode(model, s);
        enc.flush();
        const Bytes code = enc.take_bytes();

        const TracedDecode clean = decode_stream_traced(model, code, msg_len);
        const std::uint64_t usable =
            std::min<std::uint64_t>(clean.bits_consumed, std::uint64_t(code.size()) * 8);

        for (std::size_t f = 0; f < fractions.size(); ++f) {
            const std::uint64_t p =
                std::min<std::uint64_t>(usable - 1,
                                        std::uint64_t(fractions[f] * double(usable - 1) + 0.5));
            Bytes damaged = code;
            damaged[p >> 3] ^= static_cast<std::uint8_t>(0x80u >> (p & 7));

            std::vector<Symbol> got;
            got.reserve(msg_len);
            {
                StreamDecoder dec(damaged);
                try {
                    for (std::uint32_t k = 0; k < msg_len; ++k) got.push_back(dec.decode(model));
                } catch (const Error&) {
                }
            }

            std::uint64_t prefix = 0;
            while (prefix < msg_len && clean.bits_at[prefix] <= p) ++prefix;

            std::uint64_t first = msg_len;
            for (std::uint64_t k = 0; k < msg_len; ++k) {
                const bool match = k < got.size() && got[k] == msg[k];
                if (!match) {
                    first = k;
                    break;
                }
            }
            Acc& a = acc[f];
            a.flip_sum += double(p);
            a.first_sum += double(first);
            if (first == 0) ++a.zero_first;
            if (first < prefix) ++a.violations;
            for (std::uint64_t k = prefix; k < msg_len; ++k) {
                ++a.post;
                if (!(k < got.size() && got[k] == msg[k])) ++a.mism;
            }
        }
    }

    std::vector<AvalancheReport> out;
    for (std::size_t f = 0; f < fractions.size(); ++f) {
        const Acc& a = acc[f];
        AvalancheReport r;
        r.position_fraction = fractions[f];
        r.trials = trials;
        if (trials) {
            r.flip_bit_position = a.flip_sum / trials;
            r.first_corrupted_symbol_index = a.first_sum / trials;
            r.frac_first_is_zero = double(a.zero_first) / trials;
        }
        r.symbol_error_rate = a.post ? double(a.mism) / double(a.post) : 0.0;
        r.prefix_violations = a.violations;
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------- cost ratio

struct CostRow {
    std::uint32_t size = 0;  // uncompressed stream bytes
    std::uint64_t whole_bytes = 0;
    std::uint64_t tail_bytes = 0;
    double ratio = 0;
};

struct CostRatioReport {
    std::vector<CostRow> rows;
    double mean_size = 0;
    double predicted_ratio = 0;   // mean_size / 16
    double measured_ratio = 0;    // total bytes hashed, whole vs tails
    double time_whole_s = 0;      // wall time actually spent hashing
    double time_tail_s = 0;
    double time_ratio = 0;
};

/// Hashes each stream twice, once whole and once tail-only, counting bytes
/// fed to the digest and the wall time spent. The byte ratio is the claim;
/// the timing ratio is context.
inline CostRatioReport run_cost_ratio(const std::vector<std::uint32_t>& cds_sizes,
                                      std::uint32_t repeats = 64, std::uint64_t seed = 1) {
    CostRatioReport report;
    if (cds_sizes.empty()) return report;

    detail::SplitMix64 rng{seed};
    std::vector<Bytes> buffers;
    for (std::uint32_t size : cds_sizes) {
        Bytes b(size);
        for (auto& byte : b) byte = static_cast<std::uint8_t>(rng.next());
        buffers.push_back(std::move(b));
    }

    using clock = std::chrono::steady_clock;
    std::uint64_t whole_total = 0, tail_total = 0;
    volatile std::uint8_t sink_byte = 0;  // keep the hashing loops observable

    auto t0 = clock::now();
    for (std::uint32_t rep = 0; rep < repeats; ++rep)
        for (const Bytes& b : buffers) {
            Digest224 d = sha224(b);
            sink_byte = sink_byte ^ d[0];
        }
    auto t1 = clock::now();
    for (std::uint32_t rep = 0; rep < repeats; ++rep)
        for (const Bytes& b : buffers) {
            const std::size_t take = b.size() < kTailBytes ? b.size() : kTailBytes;
            Digest224 d = sha224(ByteView(b.data() + b.size() - take, take));
            sink_byte = sink_byte ^ d[0];
        }
    auto t2 = clock::now();

    double size_sum = 0;
    for (const Bytes& b : buffers) {
        CostRow row;
        row.size = static_cast<std::uint32_t>(b.size());
        row.whole_bytes = b.size();
        row.tail_bytes = b.size() < kTailBytes ? b.size() : kTailBytes;
        row.ratio = double(row.whole_bytes) / double(row.tail_bytes);
        whole_total += row.whole_bytes;
        tail_total += row.tail_bytes;
        size_sum += double(b.size());
        report.rows.push_back(row);
    }
    report.mean_size = size_sum / double(buffers.size());
    report.predicted_ratio = report.mean_size / double(kTailBytes);
    report.measured_ratio = tail_total ? double(whole_total) / double(tail_total) : 0.0;
    report.time_whole_s = std::chrono::duration<double>(t1 - t0).count();
    report.time_tail_s = std::chrono::duration<double>(t2 - t1).count();
    report.time_ratio = report.time_tail_s > 0 ? report.time_whole_s / report.time_tail_s : 0.0;
    return report;
}

// ----------------------------------------------------------------- reporting

namespace detail {
inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}
}  // namespace detail

inline std::string to_csv(const RedundancyReport& r, char sep = ',') {
    std::ostringstream os;
    os << "epsilon" << sep << "epsilon_achieved" << sep << "n_symbols" << sep << "trial" << sep
       << "extra_bits\n";
    for (std::size_t i = 0; i < r.per_trial.size(); ++i)
        os << detail::fmt(r.epsilon) << sep << detail::fmt(r.epsilon_achieved) << sep
           << r.n_symbols << sep << i << sep << detail::fmt(r.per_trial[i]) << "\n";
    return os.str();
}

inline std::string summarize(const RedundancyReport& r) {
    std::ostringstream os;
    os << "redundancy: epsilon=" << detail::fmt(r.epsilon)
       << " achieved=" << detail::fmt(r.epsilon_achieved) << " (forbidden " << r.forbidden_freq
       << "/" << r.model_total << ")\n"
       << "  predicted " << detail::fmt(r.predicted_extra_bits) << " bits per block of "
       << r.n_symbols << " symbols (at achieved ratio "
       << detail::fmt(r.predicted_extra_bits_achieved) << ")\n"
       << "  measured  " << detail::fmt(r.measured_extra_bits) << " bits mean over " << r.trials
       << " blocks (sd " << detail::fmt(r.measured_stddev) << ")\n";
    return os.str();
}

inline std::string to_csv(const ExpansionReport& r, char sep = ',') {
    std::ostringstream os;
    os << "label" << sep << "width_reference" << sep << "width_mapped" << sep << "ratio" << sep
       << "extra_bits\n";
    for (const auto& row : r.rows)
        os << row.label << sep << decimal_string(row.width_reference, 12) << sep
           << decimal_string(row.width_mapped, 12) << sep << row.ratio.str() << sep
           << row.extra_bits << "\n";
    return os.str();
}

inline std::string summarize(const ExpansionReport& r) {
    std::ostringstream os;
    os << "expansion:\n";
    for (const auto& row : r.rows)
        os << "  " << row.label << ": width ratio " << row.ratio.str() << ", " << row.extra_bits
           << " extra bits\n";
    return os.str();
}

inline std::string to_csv(const std::vector<AvalancheReport>& rows, char sep = ',') {
    std::ostringstream os;
    os << "position_fraction" << sep << "flip_bit_position" << sep
       << "first_corrupted_symbol_index" << sep << "frac_first_is_zero" << sep
       << "symbol_error_rate" << sep << "trials" << sep << "prefix_violations\n";
    for (const auto& r : rows)
        os << detail::fmt(r.position_fraction) << sep << detail::fmt(r.flip_bit_position) << sep
           << detail::fmt(r.first_corrupted_symbol_index) << sep
           << detail::fmt(r.frac_first_is_zero) << sep << detail::fmt(r.symbol_error_rate) << sep
           << r.trials << sep << r.prefix_violations << "\n";
    return os.str();
}

inline std::string summarize(const std::vector<AvalancheReport>& rows) {
    std::ostringstream os;
    os << "avalanche:\n";
    for (const auto& r : rows)
        os << "  flip at " << detail::fmt(r.position_fraction * 100)
           << "% of code bits: mean first corrupted symbol "
           << detail::fmt(r.first_corrupted_symbol_index) << ", post-prefix error rate "
           << detail::fmt(r.symbol_error_rate) << " (" << r.trials << " trials, "
           << r.prefix_violations << " prefix violations)\n";
    return os.str();
}

inline std::string to_csv(const CostRatioReport& r, char sep = ',') {
    std::ostringstream os;
    os << "size" << sep << "whole_bytes" << sep << "tail_bytes" << sep << "ratio\n";
    for (const auto& row : r.rows)
        os << row.size << sep << row.whole_bytes << sep << row.tail_bytes << sep
           << detail::fmt(row.ratio) << "\n";
    return os.str();
}

inline std::string summarize(const CostRatioReport& r) {
    std::ostringstream os;
    os << "cost ratio: mean stream " << detail::fmt(r.mean_size) << " bytes, predicted "
       << detail::fmt(r.predicted_ratio) << "x, measured bytes-hashed ratio "
       << detail::fmt(r.measured_ratio) << "x\n"
       << "  hash wall time whole " << detail::fmt(r.time_whole_s) << " s vs tails "
       << detail::fmt(r.time_tail_s) << " s (" << detail::fmt(r.time_ratio) << "x)\n";
    return os.str();
}

}  // namespace acsf
