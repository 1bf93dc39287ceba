#include "parmine/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "parmine/error.hpp"
#include "parmine/random.hpp"
#include "parmine/utf8.hpp"

namespace parmine {

TaskType parse_task_type(std::string_view name) {
  if (name == "english->classical" || name == "english_to_classical") return TaskType::EnglishToClassical;
  if (name == "crosslingual-parallel" || name == "crosslingual_parallel") return TaskType::CrosslingualParallel;
  if (name == "verse->commentary" || name == "verse_to_commentary") return TaskType::VerseToCommentary;
  if (name == "qa") return TaskType::Qa;
  throw ConfigError("unknown task type \"" + std::string(name) + "\"");
}

std::string_view to_string(TaskType type) {
  switch (type) {
    case TaskType::EnglishToClassical: return "english->classical";
    case TaskType::CrosslingualParallel: return "crosslingual-parallel";
    case TaskType::VerseToCommentary: return "verse->commentary";
    case TaskType::Qa: return "qa";
  }
  return "?";
}

std::vector<EvalQuery> read_task_jsonl(std::istream& in) {
  std::vector<EvalQuery> queries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      EvalQuery q;
      q.text = j.at("query").get<std::string>();
      q.lang = j.at("query_lang").get<std::string>();
      q.gold = SegmentId::parse(j.at("gold").get<std::string>());
      if (j.contains("query_pivot")) q.pivot = j["query_pivot"].get<std::string>();
      queries.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("task line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("task line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (queries.empty()) throw DataError("task file has no queries");
  return queries;
}

std::map<std::string, std::size_t> allocate_counts(std::size_t total,
                                                   const std::map<std::string, double>& weights) {
  if (weights.empty()) throw ConfigError("eval.weights must not be empty");
  double sum = 0.0;
  for (const auto& [lang, w] : weights) {
    if (!(w >= 0.0)) throw ConfigError("eval.weights." + lang + " must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("eval.weights must sum to 1 (got " + std::to_string(sum) + ")");
  }
  struct Share {
    std::string lang;
    std::size_t count;
    double remainder;
  };
  std::vector<Share> shares;
  std::size_t assigned = 0;
  for (const auto& [lang, w] : weights) {
    const double exact = static_cast<double>(total) * w;
    const double whole = std::floor(exact);
    shares.push_back({lang, static_cast<std::size_t>(whole), exact - whole});
    assigned += static_cast<std::size_t>(whole);
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return shares[a].remainder > shares[b].remainder;
  });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size(), ++assigned) {
    ++shares[order[k]].count;
  }
  // Weights summing to slightly over 1 can overshoot; take from the smallest remainders.
  for (std::size_t k = order.size(); assigned > total && k > 0; --k) {
    auto& share = shares[order[k - 1]];
    if (share.count > 0) {
      --share.count;
      --assigned;
    }
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& s : shares) counts[s.lang] = s.count;
  return counts;
}

std::vector<SegmentId> sample_negatives(
    const std::map<std::string, std::vector<SegmentId>>& corpora, std::size_t total,
    const std::map<std::string, double>& weights, std::uint64_t seed) {
  const auto counts = allocate_counts(total, weights);
  Rng rng(seed);
  std::vector<SegmentId> pool;
  pool.reserve(total);
  for (const auto& [lang, count] : counts) {
    const auto it = corpora.find(lang);
    const std::size_t available = it == corpora.end() ? 0 : it->second.size();
    if (count > available) {
      throw DataError("corpus '" + lang + "' too small: need " + std::to_string(count) +
                      " sentences, has " + std::to_string(available));
    }
    if (count == 0) continue;
    // Partial Fisher-Yates: the first `count` slots become the sample.
    std::vector<std::size_t> idx(available);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, available - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i : idx) pool.push_back(it->second[i]);
  }
  return pool;
}

std::size_t add_golds(std::vector<SegmentId>& pool, const std::vector<SegmentId>& golds) {
  std::set<SegmentId> present(pool.begin(), pool.end());
  std::size_t added = 0;
  for (const auto& g : golds) {
    if (present.insert(g).second) {
      pool.push_back(g);
      ++added;
    }
  }
  return added;
}

std::vector<std::string> tokenize_for_bm25(std::string_view text, std::string_view lang) {
  std::vector<std::string> tokens;
  if (lang == "zh") {
    for (char32_t cp : utf8::decode(text)) {
      if (utf8::is_space(cp) || utf8::is_punct(cp)) continue;
      std::string tok;
      utf8::append(tok, cp);
      tokens.push_back(std::move(tok));
    }
    return tokens;
  }
  if (lang == "en") {
    std::string current;
    for (char32_t cp : utf8::decode(text)) {
      const bool ascii_alnum = (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
                               (cp >= U'0' && cp <= U'9');
      const bool word = ascii_alnum || (cp >= 0x80 && !utf8::is_space(cp) && !utf8::is_punct(cp));
      if (word) {
        utf8::append(current, (cp >= U'A' && cp <= U'Z') ? cp + (U'a' - U'A') : cp);
      } else if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
  }
  std::string current;
  for (char32_t cp : utf8::decode(text)) {
    if (utf8::is_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      utf8::append(current, cp);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Bm25Index::Bm25Index(const std::vector<std::vector<std::string>>& docs, Bm25Params params)
    : params_(params) {
  if (docs.empty()) throw DataError("BM25 index needs at least one document");
  doc_len_.reserve(docs.size());
  std::size_t total_len = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    doc_len_.push_back(docs[d].size());
    total_len += docs[d].size();
    std::unordered_map<std::string_view, std::uint32_t> tf;
    for (const auto& tok : docs[d]) ++tf[tok];
    for (const auto& [term, freq] : tf) {
      postings_[std::string(term)].push_back({static_cast<std::uint32_t>(d), freq});
    }
  }
  for (auto& [term, list] : postings_) {
    std::sort(list.begin(), list.end(), [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
  }
  avgdl_ = static_cast<double>(total_len) / static_cast<double>(docs.size());
}

std::size_t Bm25Index::doc_freq(std::string_view term) const {
  const auto it = postings_.find(std::string(term));
  return it == postings_.end() ? 0 : it->second.size();
}

double Bm25Index::idf(std::string_view term) const {
  const double n = static_cast<double>(size());
  const double nt = static_cast<double>(doc_freq(term));
  return std::log(1.0 + (n - nt + 0.5) / (nt + 0.5));
}

std::vector<double> Bm25Index::scores(const std::vector<std::string>& query) const {
  std::vector<double> out(size(), 0.0);
  const double k1 = params_.k1;
  const double b = params_.b;
  for (const auto& term : query) {
    const auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double w = idf(term);
    for (const Posting& p : it->second) {
      const double f = p.freq;
      const double norm = k1 * (1.0 - b + b * static_cast<double>(doc_len_[p.doc]) / avgdl_);
      out[p.doc] += w * (f * (k1 + 1.0)) / (f + norm);
    }
  }
  return out;
}

std::vector<std::size_t> top_k_by_score(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::size_t> ids(scores.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  const auto before = [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  k = std::min(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), before);
  ids.resize(k);
  return ids;
}

std::vector<std::size_t> Bm25Index::rank(const std::vector<std::string>& query) const {
  return top_k_by_score(scores(query), size());
}

std::vector<std::size_t> Bm25Index::top_k(const std::vector<std::string>& query,
                                          std::size_t k) const {
  return top_k_by_score(scores(query), k);
}

std::vector<std::size_t> dense_top_k(std::span<const float> query, const EmbeddingMatrix& pool,
                                     std::size_t k) {
  if (pool.empty()) return {};
  if (query.size() != pool.dim()) {
    throw DataError("dense_rank: dimension mismatch " + std::to_string(query.size()) + " vs " +
                    std::to_string(pool.dim()));
  }
  std::vector<double> scores(pool.count());
  for (std::size_t i = 0; i < pool.count(); ++i) scores[i] = dot(query, pool.row(i));
  return top_k_by_score(scores, k);
}

std::vector<std::size_t> dense_rank(std::span<const float> query, const EmbeddingMatrix& pool) {
  return dense_top_k(query, pool, pool.count());
}

Metrics precision_at_k(const std::vector<std::vector<std::size_t>>& rankings,
                       const std::vector<std::size_t>& golds, const std::vector<std::size_t>& ks) {
  if (rankings.size() != golds.size()) {
    throw DataError("missing ranking: " + std::to_string(golds.size()) + " queries, " +
                    std::to_string(rankings.size()) + " rankings");
  }
  Metrics m;
  m.n_queries = golds.size();
  for (std::size_t k : ks) m.p_at[k] = 0.0;
  if (golds.empty()) return m;
  for (std::size_t q = 0; q < golds.size(); ++q) {
    const auto& r = rankings[q];
    const auto it = std::find(r.begin(), r.end(), golds[q]);
    const std::size_t rank = static_cast<std::size_t>(it - r.begin());  // 0-based; size() if absent
    for (std::size_t k : ks) {
      if (it != r.end() && rank < k) m.p_at[k] += 1.0;
    }
  }
  for (auto& [k, v] : m.p_at) v /= static_cast<double>(golds.size());
  return m;
}

std::string format_percent(double fraction) {
  return std::to_string(static_cast<long>(std::lround(fraction * 100.0)));
}

void write_report_tsv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "task\tstrategy\tP@1\tP@5\tP@10\n";
  for (const auto& row : rows) {
    const auto p = [&](std::size_t k) {
      const auto it = row.metrics.p_at.find(k);
      return it == row.metrics.p_at.end() ? std::string("-") : format_percent(it->second);
    };
    out << row.task << '\t' << row.strategy << '\t' << p(1) << '\t' << p(5) << '\t' << p(10) << '\n';
  }
}

}  // namespace parmine
