#include "parmine/knn.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "parmine/error.hpp"
#include "parmine/parallel.hpp"
#include "tsv.hpp"

namespace parmine {
namespace {

struct Hit {
  double sim;
  std::size_t target;
};

// Ranking order: higher sim first, then lower target index.
bool better(const Hit& a, const Hit& b) {
  return a.sim > b.sim || (a.sim == b.sim && a.target < b.target);
}

// Bounded best-k list kept sorted by `better`.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { hits_.reserve(k + 1); }

  void offer(double sim, std::size_t target) {
    const Hit h{sim, target};
    if (hits_.size() == k_ && !better(h, hits_.back())) return;
    auto pos = std::upper_bound(hits_.begin(), hits_.end(), h,
                                [](const Hit& x, const Hit& y) { return better(x, y); });
    hits_.insert(pos, h);
    if (hits_.size() > k_) hits_.pop_back();
  }

  const std::vector<Hit>& hits() const { return hits_; }

 private:
  std::size_t k_;
  std::vector<Hit> hits_;
};

// Rows [r0, r1) widened to double, each padded with zeros to `stride`
// elements. Products of widened floats are exact and the zero padding only
// adds +0 to a lane, so the kernels below reproduce dot() bit for bit.
void widen(const EmbeddingMatrix& m, std::size_t r0, std::size_t r1, std::size_t stride,
           std::vector<double>& out) {
  out.assign((r1 - r0) * stride, 0.0);
  for (std::size_t r = r0; r < r1; ++r) {
    const auto row = m.row(r);
    double* dst = out.data() + (r - r0) * stride;
    for (std::size_t i = 0; i < row.size(); ++i) dst[i] = row[i];
  }
}

#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
#define PARMINE_KERNEL __attribute__((target_clones("avx2", "default")))
#else
#define PARMINE_KERNEL
#endif

// Four lanes of one pair; lane j accumulates elements i with i % 4 == j.
typedef double Lanes __attribute__((vector_size(32)));

#define PARMINE_LOAD4(v, p) std::memcpy(&(v), (p), sizeof(Lanes))

inline double combine(const Lanes& l) { return (l[0] + l[1]) + (l[2] + l[3]); }

// Four query rows against two index rows.
PARMINE_KERNEL
void dot_4x2(const double* const* q, const double* t0, const double* t1, std::size_t n,
             double out[8]) {
  Lanes s[8] = {};
  for (std::size_t i = 0; i < n; i += 4) {
    Lanes y0, y1;
    PARMINE_LOAD4(y0, t0 + i);
    PARMINE_LOAD4(y1, t1 + i);
    for (std::size_t r = 0; r < 4; ++r) {
      Lanes x;
      PARMINE_LOAD4(x, q[r] + i);
      s[2 * r] += x * y0;
      s[2 * r + 1] += x * y1;
    }
  }
  for (std::size_t r = 0; r < 8; ++r) out[r] = combine(s[r]);
}

PARMINE_KERNEL
double dot_1x1(const double* a, const double* b, std::size_t n) {
  Lanes s = {};
  for (std::size_t i = 0; i < n; i += 4) {
    Lanes x, y;
    PARMINE_LOAD4(x, a + i);
    PARMINE_LOAD4(y, b + i);
    s += x * y;
  }
  return combine(s);
}

// Exhaustive blocked search. When groups are given, query q never matches an
// index row of the same group.
std::vector<Neighbor> search(const EmbeddingMatrix& queries, const EmbeddingMatrix& index,
                             const KnnParams& params, const std::vector<std::size_t>* query_groups,
                             const std::vector<std::size_t>* index_groups) {
  if (params.k < 1) throw ConfigError("mining.k must be >= 1");
  if (queries.empty() || index.empty()) return {};
  if (queries.dim() != index.dim()) {
    throw DataError("kNN dimension mismatch: queries " + std::to_string(queries.dim()) +
                    ", index " + std::to_string(index.dim()));
  }
  const std::size_t stride = (queries.dim() + 3) / 4 * 4;
  const std::size_t qblock = std::max<std::size_t>(1, params.query_block);
  const std::size_t iblock = std::max<std::size_t>(1, params.index_block);
  const std::size_t n_qblocks = (queries.count() + qblock - 1) / qblock;
  std::vector<std::vector<Neighbor>> per_block(n_qblocks);

  parallel_for(n_qblocks, params.threads, [&](std::size_t b) {
    const std::size_t q0 = b * qblock;
    const std::size_t q1 = std::min(queries.count(), q0 + qblock);
    std::vector<TopK> best(q1 - q0, TopK(params.k));
    std::vector<double> qv, iv;
    widen(queries, q0, q1, stride, qv);
    const auto offer = [&](std::size_t q, std::size_t t, double sim) {
      if (sim < params.min_sim) return;
      if (index_groups && (*index_groups)[t] == (*query_groups)[q]) return;
      best[q - q0].offer(sim, t);
    };
    for (std::size_t i0 = 0; i0 < index.count(); i0 += iblock) {
      const std::size_t i1 = std::min(index.count(), i0 + iblock);
      widen(index, i0, i1, stride, iv);
      const auto qrow = [&](std::size_t q) { return qv.data() + (q - q0) * stride; };
      const auto irow = [&](std::size_t t) { return iv.data() + (t - i0) * stride; };
      std::size_t q = q0;
      for (; q + 4 <= q1; q += 4) {
        const double* rows[4] = {qrow(q), qrow(q + 1), qrow(q + 2), qrow(q + 3)};
        std::size_t t = i0;
        for (; t + 2 <= i1; t += 2) {
          double s[8];
          dot_4x2(rows, irow(t), irow(t + 1), stride, s);
          for (std::size_t r = 0; r < 4; ++r) {
            offer(q + r, t, s[2 * r]);
            offer(q + r, t + 1, s[2 * r + 1]);
          }
        }
        if (t < i1) {
          for (std::size_t r = 0; r < 4; ++r) offer(q + r, t, dot_1x1(rows[r], irow(t), stride));
        }
      }
      for (; q < q1; ++q) {
        for (std::size_t t = i0; t < i1; ++t) offer(q, t, dot_1x1(qrow(q), irow(t), stride));
      }
    }
    auto& out = per_block[b];
    for (std::size_t q = q0; q < q1; ++q) {
      for (const Hit& h : best[q - q0].hits()) out.push_back({q, h.target, h.sim});
    }
  });

  std::vector<Neighbor> result;
  for (auto& block : per_block) result.insert(result.end(), block.begin(), block.end());
  return result;
}

std::vector<std::size_t> document_groups(const std::vector<Window>& windows,
                                         std::unordered_map<std::string, std::size_t>& ids) {
  std::vector<std::size_t> groups(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    groups[i] = ids.try_emplace(windows[i].doc_id, ids.size()).first->second;
  }
  return groups;
}

}  // namespace

std::vector<Neighbor> knn_search(const EmbeddingMatrix& queries, const EmbeddingMatrix& index,
                                 const KnnParams& params) {
  return search(queries, index, params, nullptr, nullptr);
}

std::vector<CandidatePair> mine_pairs(const EmbeddedWindows& src, const EmbeddedWindows& tgt,
                                      const MiningParams& params) {
  if (!src.windows || !src.matrix || !tgt.windows || !tgt.matrix) {
    throw ConfigError("mine_pairs: windows and matrices are required");
  }
  if (src.windows->size() != src.matrix->count() || tgt.windows->size() != tgt.matrix->count()) {
    throw DataError("window count does not match embedding row count");
  }
  std::vector<std::size_t> src_groups, tgt_groups;
  if (params.exclude_same_doc) {
    std::unordered_map<std::string, std::size_t> ids;
    src_groups = document_groups(*src.windows, ids);
    tgt_groups = document_groups(*tgt.windows, ids);
  }
  const auto* sg = params.exclude_same_doc ? &src_groups : nullptr;
  const auto* tg = params.exclude_same_doc ? &tgt_groups : nullptr;

  std::vector<Neighbor> hits = search(*src.matrix, *tgt.matrix, params.knn, sg, tg);
  if (params.symmetric) {
    for (const Neighbor& n : search(*tgt.matrix, *src.matrix, params.knn, tg, sg)) {
      hits.push_back({n.target, n.query, n.sim});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.query != b.query) return a.query < b.query;
    if (a.target != b.target) return a.target < b.target;
    return a.sim > b.sim;
  });
  hits.erase(std::unique(hits.begin(), hits.end(),
                         [](const Neighbor& a, const Neighbor& b) {
                           return a.query == b.query && a.target == b.target;
                         }),
             hits.end());
  std::sort(hits.begin(), hits.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.query != b.query) return a.query < b.query;
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.target < b.target;
  });

  std::vector<CandidatePair> pairs;
  pairs.reserve(hits.size());
  for (const Neighbor& n : hits) {
    const Window& s = (*src.windows)[n.query];
    const Window& t = (*tgt.windows)[n.target];
    pairs.push_back({{s.doc_id, s.position, n.query}, {t.doc_id, t.position, n.target}, n.sim});
  }
  return pairs;
}

void write_pairs_tsv(std::ostream& out, const std::vector<CandidatePair>& pairs) {
  out << "src_doc\tsrc_pos\ttgt_doc\ttgt_pos\tsim\n";
  for (const auto& p : pairs) {
    out << tsv::escape(p.src.doc_id) << '\t' << p.src.position << '\t' << tsv::escape(p.tgt.doc_id)
        << '\t' << p.tgt.position << '\t' << tsv::fixed6(p.sim) << '\n';
  }
}

std::vector<PairRecord> read_pairs_tsv(std::istream& in) {
  std::vector<PairRecord> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = tsv::chomp(line);
    if (line_no == 1 || row.empty()) continue;
    const auto f = tsv::split(row);
    if (f.size() != 5) throw DataError("pairs line " + std::to_string(line_no) + ": expected 5 columns");
    PairRecord p;
    p.src_doc = tsv::unescape(f[0]);
    p.src_pos = tsv::to_size(f[1], "src_pos", line_no);
    p.tgt_doc = tsv::unescape(f[2]);
    p.tgt_pos = tsv::to_size(f[3], "tgt_pos", line_no);
    p.sim = tsv::to_double(f[4], "sim", line_no);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace parmine
