#include "parmine/audit.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "parmine/error.hpp"
#include "parmine/random.hpp"
#include "parmine/utf8.hpp"
#include "tsv.hpp"

namespace parmine {

std::string_view to_string(AuditLabel label) noexcept {
  switch (label) {
    case AuditLabel::Perfect: return "Perfect";
    case AuditLabel::PartlyCorrect: return "PartlyCorrect";
    case AuditLabel::Wrong: return "Wrong";
  }
  return "?";
}

AuditLabel parse_audit_label(std::string_view text) {
  std::string key;
  for (char c : utf8::trim(text)) {
    if (c == ' ' || c == '_' || c == '-') continue;
    key.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
  }
  if (key == "perfect" || key == "correct") return AuditLabel::Perfect;
  if (key == "partlycorrect" || key == "partiallycorrect") return AuditLabel::PartlyCorrect;
  if (key == "wrong") return AuditLabel::Wrong;
  throw DataError("unknown audit label \"" + std::string(text) + "\"");
}

std::vector<std::size_t> sample_for_audit(std::size_t size, std::size_t n, std::uint64_t seed) {
  if (n > size) {
    throw DataError("cannot sample " + std::to_string(n) + " pairs from a dataset of " +
                    std::to_string(size));
  }
  std::vector<std::size_t> reservoir(n);
  std::iota(reservoir.begin(), reservoir.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i < size; ++i) {
    const std::uint64_t j = uniform_below(rng, i + 1);
    if (j < n) reservoir[j] = i;
  }
  std::sort(reservoir.begin(), reservoir.end());
  return reservoir;
}

std::vector<AlignedPair> sample_pairs_for_audit(std::vector<AlignedPair> pairs, std::size_t n,
                                                std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(pairs.size());
  for (const auto& p : pairs) ids.push_back(p.pair_id());
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  std::vector<AlignedPair> sample;
  for (std::size_t k : sample_for_audit(pairs.size(), n, seed)) sample.push_back(pairs[order[k]]);
  return sample;
}

AuditRates report_rates(const std::vector<AuditRecord>& records) {
  if (records.empty()) throw DataError("no audit labels to report");
  std::set<std::pair<std::string, std::string>> seen;
  AuditRates rates;
  for (const auto& r : records) {
    if (!seen.insert({r.pair_id, r.annotator}).second) {
      throw DataError("pair '" + r.pair_id + "' labelled twice by '" + r.annotator + "'");
    }
    ++rates.counts[static_cast<std::size_t>(r.label)];
  }
  rates.total = records.size();
  std::array<std::size_t, 3> remainder{};
  int assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    rates.percent[i] = static_cast<int>(rates.counts[i] * 100 / rates.total);
    remainder[i] = rates.counts[i] * 100 % rates.total;
    assigned += rates.percent[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < 100; ++k, ++assigned) ++rates.percent[order[k % 3]];
  return rates;
}

void write_audit_tsv(std::ostream& out, const std::vector<AlignedPair>& pairs) {
  out << "pair_id\tsrc_text\ttgt_text\tlabel\tnote\n";
  for (const auto& p : pairs) {
    out << tsv::escape(p.pair_id()) << '\t' << tsv::escape(p.src_text) << '\t'
        << tsv::escape(p.tgt_text) << "\t\t\n";
  }
}

std::vector<AuditRecord> read_audit_tsv(std::istream& in, const std::string& annotator) {
  std::vector<AuditRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = tsv::chomp(line);
    if (line_no == 1 || row.empty()) continue;
    const auto f = tsv::split(row);
    if (f.size() < 4 || f.size() > 5) {
      throw DataError("audit line " + std::to_string(line_no) + ": expected 5 columns");
    }
    if (utf8::trim(f[3]).empty()) continue;
    AuditRecord r;
    r.pair_id = tsv::unescape(f[0]);
    try {
      r.label = parse_audit_label(f[3]);
    } catch (const DataError& e) {
      throw DataError("audit line " + std::to_string(line_no) + ": " + e.what());
    }
    r.annotator = annotator;
    if (f.size() == 5) r.note = tsv::unescape(f[4]);
    records.push_back(std::move(r));
  }
  return records;
}

void write_rates_tsv(std::ostream& out, const AuditRates& rates) {
  out << "label\tcount\tpercent\n";
  for (std::size_t i = 0; i < 3; ++i) {
    out << to_string(kAuditLabels[i]) << '\t' << rates.counts[i] << '\t' << rates.percent[i] << '\n';
  }
  out << "total\t" << rates.total << "\t100\n";
}

}  // namespace parmine
