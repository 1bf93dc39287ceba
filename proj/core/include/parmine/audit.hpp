#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "parmine/alignment.hpp"

namespace parmine {

enum class AuditLabel { Perfect, PartlyCorrect, Wrong };

inline constexpr std::array<AuditLabel, 3> kAuditLabels = {
    AuditLabel::Perfect, AuditLabel::PartlyCorrect, AuditLabel::Wrong};

std::string_view to_string(AuditLabel label) noexcept;
/// Accepts the canonical names case-insensitively, plus "partly correct",
/// "partially correct" and "correct". Throws DataError otherwise.
AuditLabel parse_audit_label(std::string_view text);

struct AuditRecord {
  std::string pair_id;
  AuditLabel label = AuditLabel::Perfect;
  std::string annotator;
  std::string note;
};

/// Reservoir sample of `n` stream positions out of `size`, returned in
/// ascending order. Throws DataError when n > size.
std::vector<std::size_t> sample_for_audit(std::size_t size, std::size_t n, std::uint64_t seed);

/// Samples pairs after sorting them by pair_id, so the sample does not
/// depend on the dataset's order.
std::vector<AlignedPair> sample_pairs_for_audit(std::vector<AlignedPair> pairs, std::size_t n,
                                                std::uint64_t seed);

struct AuditRates {
  std::array<std::size_t, 3> counts{};
  std::array<int, 3> percent{};  // sums to 100
  std::size_t total = 0;
};

/// Integer percentages by largest remainder; remainder ties go to the
/// earlier label. Throws DataError on empty input or on two labels for the
/// same (pair, annotator).
AuditRates report_rates(const std::vector<AuditRecord>& records);

/// TSV with header: pair_id, src_text, tgt_text, label, note.
void write_audit_tsv(std::ostream& out, const std::vector<AlignedPair>& pairs);
/// Reads an annotated sheet; rows with a blank label are skipped.
std::vector<AuditRecord> read_audit_tsv(std::istream& in, const std::string& annotator);
void write_rates_tsv(std::ostream& out, const AuditRates& rates);

}  // namespace parmine
