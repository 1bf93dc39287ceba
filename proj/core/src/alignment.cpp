#include "parmine/alignment.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "parmine/error.hpp"
#include "parmine/utf8.hpp"
#include "tsv.hpp"

namespace parmine {

std::size_t src_width(BeadType t) noexcept {
  switch (t) {
    case BeadType::OneOne: case BeadType::OneTwo: case BeadType::OneZero: return 1;
    case BeadType::TwoOne: case BeadType::TwoTwo: return 2;
    case BeadType::ZeroOne: return 0;
  }
  return 0;
}

std::size_t tgt_width(BeadType t) noexcept {
  switch (t) {
    case BeadType::OneOne: case BeadType::TwoOne: case BeadType::ZeroOne: return 1;
    case BeadType::OneTwo: case BeadType::TwoTwo: return 2;
    case BeadType::OneZero: return 0;
  }
  return 0;
}

bool is_gap(BeadType t) noexcept { return t == BeadType::OneZero || t == BeadType::ZeroOne; }

std::string_view to_string(BeadType t) noexcept {
  switch (t) {
    case BeadType::OneOne: return "1-1";
    case BeadType::TwoOne: return "2-1";
    case BeadType::OneTwo: return "1-2";
    case BeadType::TwoTwo: return "2-2";
    case BeadType::OneZero: return "1-0";
    case BeadType::ZeroOne: return "0-1";
  }
  return "?";
}

BeadType Bead::type() const {
  for (BeadType t : kBeadTypes) {
    if (src_width(t) == src.count && tgt_width(t) == tgt.count) return t;
  }
  throw DataError("bead " + std::to_string(src.count) + "-" + std::to_string(tgt.count) +
                  " is not an allowed shape");
}

double alignment_objective(const std::vector<Bead>& beads, double gap_penalty) {
  double total = 0.0;
  for (const Bead& b : beads) total += b.is_gap() ? -gap_penalty : b.score;
  return total;
}

std::vector<Bead> align_spans(std::size_t n_src, std::size_t n_tgt, const SpanScorer& scorer,
                              double gap_penalty) {
  constexpr double kUnreached = -std::numeric_limits<double>::infinity();
  const std::size_t cols = n_tgt + 1;
  std::vector<double> best((n_src + 1) * cols, kUnreached);
  std::vector<BeadType> back((n_src + 1) * cols, BeadType::OneOne);
  std::vector<double> bead_score((n_src + 1) * cols, 0.0);
  best[0] = 0.0;

  for (std::size_t i = 0; i <= n_src; ++i) {
    for (std::size_t j = 0; j <= n_tgt; ++j) {
      if (i == 0 && j == 0) continue;
      double& cell = best[i * cols + j];
      for (BeadType t : kBeadTypes) {
        const std::size_t di = src_width(t);
        const std::size_t dj = tgt_width(t);
        if (i < di || j < dj) continue;
        const double prev = best[(i - di) * cols + (j - dj)];
        if (prev == kUnreached) continue;
        const double score = is_gap(t) ? 0.0 : scorer(Span{i - di, di}, Span{j - dj, dj});
        const double candidate = prev + (is_gap(t) ? -gap_penalty : score);
        // Strictly greater: on a tie the earlier bead type keeps the cell.
        if (candidate > cell) {
          cell = candidate;
          back[i * cols + j] = t;
          bead_score[i * cols + j] = score;
        }
      }
    }
  }

  std::vector<Bead> beads;
  std::size_t i = n_src;
  std::size_t j = n_tgt;
  while (i > 0 || j > 0) {
    const BeadType t = back[i * cols + j];
    const std::size_t di = src_width(t);
    const std::size_t dj = tgt_width(t);
    beads.push_back({Span{i - di, di}, Span{j - dj, dj}, bead_score[i * cols + j]});
    i -= di;
    j -= dj;
  }
  std::reverse(beads.begin(), beads.end());
  return beads;
}

std::vector<Bead> align_region(const std::vector<std::string>& src_sents,
                               const std::vector<std::string>& tgt_sents,
                               const EmbeddingProvider& provider, std::size_t batch_size,
                               const AlignParams& params) {
  if (src_sents.empty() || tgt_sents.empty()) {
    throw DataError("align_region: both sentence lists must be non-empty");
  }
  if (src_sents.size() > params.max_region || tgt_sents.size() > params.max_region) {
    throw DataError("region of " + std::to_string(src_sents.size()) + " x " +
                    std::to_string(tgt_sents.size()) + " sentences exceeds alignment.max_region=" +
                    std::to_string(params.max_region) +
                    "; raise alignment.max_region or shrink clusters (clustering.cell_size)");
  }
  // Rows: the n single sentences followed by the n-1 adjacent pairs.
  const auto span_texts = [](const std::vector<std::string>& sents) {
    std::vector<std::string> texts(sents);
    for (std::size_t i = 0; i + 1 < sents.size(); ++i) texts.push_back(sents[i] + " " + sents[i + 1]);
    return texts;
  };
  const auto src_texts = span_texts(src_sents);
  const auto tgt_texts = span_texts(tgt_sents);
  const EmbeddingMatrix src_emb = embed_texts(provider, batch_size, src_texts);
  const EmbeddingMatrix tgt_emb = embed_texts(provider, batch_size, tgt_texts);
  if (src_emb.dim() != tgt_emb.dim()) throw DataError("align_region: embedding dims differ");

  const std::size_t ns = src_sents.size();
  const std::size_t nt = tgt_sents.size();
  const auto row_of = [](Span s, std::size_t n) { return s.count == 1 ? s.begin : n + s.begin; };
  const SpanScorer scorer = [&](Span s, Span t) {
    return cosine(src_emb.row(row_of(s, ns)), tgt_emb.row(row_of(t, nt)));
  };
  return align_spans(ns, nt, scorer, params.gap_penalty);
}

std::vector<double> moving_average(const std::vector<Bead>& beads, std::size_t window) {
  const std::size_t half = window / 2;
  std::vector<double> prefix(beads.size() + 1, 0.0);
  for (std::size_t i = 0; i < beads.size(); ++i) {
    prefix[i + 1] = prefix[i] + (beads[i].is_gap() ? 0.0 : beads[i].score);
  }
  std::vector<double> ma(beads.size());
  for (std::size_t i = 0; i < beads.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(beads.size(), i + half + 1);
    ma[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return ma;
}

namespace {

void filter_run(const std::vector<Bead>& run, std::size_t window, double threshold,
                std::vector<std::vector<Bead>>& out) {
  const auto ma = moving_average(run, window);
  std::vector<std::vector<Bead>> pieces;
  std::vector<Bead> current;
  bool dropped = false;
  for (std::size_t i = 0; i < run.size(); ++i) {
    if (ma[i] < threshold) {
      dropped = true;
      if (!current.empty()) pieces.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(run[i]);
    }
  }
  if (!current.empty()) pieces.push_back(std::move(current));
  if (!dropped) {
    out.push_back(run);
    return;
  }
  for (const auto& piece : pieces) filter_run(piece, window, threshold, out);
}

}  // namespace

std::vector<std::vector<Bead>> filter_alignment(const std::vector<Bead>& beads,
                                                std::size_t ma_window, double threshold) {
  if (ma_window < 1 || ma_window % 2 == 0) {
    throw ConfigError("alignment.ma_window must be an odd number >= 1");
  }
  std::vector<std::vector<Bead>> runs;
  if (!beads.empty()) filter_run(beads, ma_window, threshold, runs);
  return runs;
}

std::string AlignedPair::pair_id() const {
  return src_doc + "#" + format_span(src_span) + "|" + tgt_doc + "#" + format_span(tgt_span);
}

void RatioPolicy::set(const std::string& src_lang, const std::string& tgt_lang, RatioBounds b) {
  if (!(b.lo > 0.0) || b.lo > b.hi) {
    throw ConfigError("ratio bounds for " + src_lang + "-" + tgt_lang + " must satisfy 0 < lo <= hi");
  }
  explicit_[src_lang + "-" + tgt_lang] = b;
}

RatioBounds RatioPolicy::bounds(const std::string& src_lang, const std::string& tgt_lang) const {
  if (const auto it = explicit_.find(src_lang + "-" + tgt_lang); it != explicit_.end()) {
    return it->second;
  }
  const bool src_zh = src_lang == "zh";
  const bool tgt_zh = tgt_lang == "zh";
  if (src_zh && !tgt_zh) return {0.1, 1.0};
  if (tgt_zh && !src_zh) return {1.0, 10.0};
  return {0.33, 3.0};
}

RatioDecision ratio_filter(std::size_t src_chars, std::size_t tgt_chars, RatioBounds bounds) {
  if (tgt_chars == 0) return {false, "zero-length target"};
  const double ratio = static_cast<double>(src_chars) / static_cast<double>(tgt_chars);
  if (ratio < bounds.lo) return {false, "length ratio " + std::to_string(ratio) + " below bound"};
  if (ratio > bounds.hi) return {false, "length ratio " + std::to_string(ratio) + " above bound"};
  return {true, {}};
}

RatioDecision ratio_filter(const AlignedPair& pair, const RatioPolicy& policy) {
  return ratio_filter(utf8::length(pair.src_text), utf8::length(pair.tgt_text),
                      policy.bounds(pair.src_lang, pair.tgt_lang));
}

std::string format_span(Span span) {
  if (span.empty()) return std::to_string(span.begin) + "-";
  return std::to_string(span.begin) + "-" + std::to_string(span.end() - 1);
}

Span parse_span(std::string_view text) {
  const std::size_t dash = text.find('-');
  if (dash == std::string_view::npos || dash == 0) {
    throw DataError("bad span \"" + std::string(text) + "\" (expected first-last)");
  }
  const std::size_t first = tsv::to_size(text.substr(0, dash), "span start", 0);
  const std::string_view rest = text.substr(dash + 1);
  if (rest.empty()) return {first, 0};
  const std::size_t last = tsv::to_size(rest, "span end", 0);
  if (last < first) throw DataError("bad span \"" + std::string(text) + "\"");
  return {first, last - first + 1};
}

std::string aligned_pair_to_json(const AlignedPair& p) {
  nlohmann::ordered_json j;
  j["src_doc"] = p.src_doc;
  j["src_lang"] = p.src_lang;
  j["src_span"] = format_span(p.src_span);
  j["tgt_doc"] = p.tgt_doc;
  j["tgt_lang"] = p.tgt_lang;
  j["tgt_span"] = format_span(p.tgt_span);
  j["score"] = p.score;
  j["src_text"] = p.src_text;
  j["tgt_text"] = p.tgt_text;
  j["cluster"] = p.cluster;
  return j.dump();
}

AlignedPair aligned_pair_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    AlignedPair p;
    p.src_doc = j.at("src_doc").get<std::string>();
    p.src_lang = j.value("src_lang", std::string{});
    p.src_span = parse_span(j.at("src_span").get<std::string>());
    p.tgt_doc = j.at("tgt_doc").get<std::string>();
    p.tgt_lang = j.value("tgt_lang", std::string{});
    p.tgt_span = parse_span(j.at("tgt_span").get<std::string>());
    p.score = j.at("score").get<double>();
    p.src_text = j.at("src_text").get<std::string>();
    p.tgt_text = j.at("tgt_text").get<std::string>();
    p.cluster = j.value("cluster", std::size_t{0});
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed aligned pair: ") + e.what());
  }
}

void write_dataset_tsv(std::ostream& out, const std::vector<AlignedPair>& pairs) {
  out << "src_doc\tsrc_span\ttgt_doc\ttgt_span\tscore\tsrc_text\ttgt_text\n";
  for (const auto& p : pairs) {
    out << tsv::escape(p.src_doc) << '\t' << format_span(p.src_span) << '\t' << tsv::escape(p.tgt_doc)
        << '\t' << format_span(p.tgt_span) << '\t' << tsv::fixed6(p.score) << '\t'
        << tsv::escape(p.src_text) << '\t' << tsv::escape(p.tgt_text) << '\n';
  }
}

void write_dataset_jsonl(std::ostream& out, const std::vector<AlignedPair>& pairs) {
  for (const auto& p : pairs) out << aligned_pair_to_json(p) << '\n';
}

std::vector<AlignedPair> read_dataset_jsonl(std::istream& in) {
  std::vector<AlignedPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      pairs.push_back(aligned_pair_from_json(line));
    } catch (const DataError& e) {
      throw DataError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pairs;
}

}  // namespace parmine
