#include "pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <tuple>

#include "parmine/audit.hpp"
#include "parmine/corpus.hpp"
#include "parmine/error.hpp"
#include "parmine/parallel.hpp"
#include "parmine/vector_file.hpp"

namespace parmine::cli {
namespace {

namespace fs = std::filesystem;

fs::path out_path(const PipelineConfig& cfg, const char* name) { return cfg.output_dir / name; }

std::ostream& logger(RunContext& ctx) { return ctx.log ? *ctx.log : std::clog; }

void ensure_output_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw DataError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw DataError("write failed: " + path.string());
}

std::ifstream open_input(const fs::path& path, RunContext& ctx) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string() + " (run the producing stage first)");
  ctx.manifest.record_input(path);
  return in;
}

const fs::path& corpus_path(const PipelineConfig& cfg, const std::string& lang) {
  const auto it = cfg.corpora.find(lang);
  if (it == cfg.corpora.end()) throw ConfigError("no corpus configured for language '" + lang + "'");
  return it->second;
}

CorpusStore load_lang(const PipelineConfig& cfg, const std::string& lang, RunContext& ctx) {
  const fs::path& path = corpus_path(cfg, lang);
  if (!fs::exists(path)) throw DataError("corpus file not found: " + path.string());
  ctx.manifest.record_input(path);
  return load_corpus_file(path.string(), LanguageTag(lang));
}

void require_mining_langs(const PipelineConfig& cfg) {
  if (cfg.source_lang.empty() || cfg.target_lang.empty()) {
    throw ConfigError("mining.source_lang and mining.target_lang must be set");
  }
  corpus_path(cfg, cfg.source_lang);
  corpus_path(cfg, cfg.target_lang);
}

struct Sides {
  CorpusStore src;
  CorpusStore tgt_storage;
  bool same = false;
  const CorpusStore& tgt() const { return same ? src : tgt_storage; }
};

Sides load_sides(const PipelineConfig& cfg, RunContext& ctx) {
  require_mining_langs(cfg);
  Sides sides;
  sides.src = load_lang(cfg, cfg.source_lang, ctx);
  sides.same = cfg.source_lang == cfg.target_lang;
  if (!sides.same) sides.tgt_storage = load_lang(cfg, cfg.target_lang, ctx);
  return sides;
}

std::vector<Window> read_windows(const fs::path& path, const CorpusStore& store,
                                 const WindowParams& params, RunContext& ctx) {
  auto in = open_input(path, ctx);
  try {
    return read_windows_tsv(in, store, params);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string window_id(const Window& w) { return w.doc_id + "#" + std::to_string(w.position); }

EmbeddingMatrix embed_parallel(const EmbeddingProvider& provider, std::size_t batch_size,
                               const std::vector<std::string>& texts, std::size_t threads) {
  const std::size_t n_batches = (texts.size() + batch_size - 1) / batch_size;
  std::vector<EmbeddingMatrix> parts(n_batches);
  const std::span<const std::string> all(texts);
  parallel_for(n_batches, threads, [&](std::size_t b) {
    const std::size_t begin = b * batch_size;
    parts[b] = embed_texts(provider, batch_size, all.subspan(begin, std::min(batch_size, texts.size() - begin)));
  });
  EmbeddingMatrix out;
  for (const auto& part : parts) {
    if (!out.empty() && part.dim() != out.dim()) {
      throw DataError("dimension mismatch across batches: " + std::to_string(out.dim()) + " vs " +
                      std::to_string(part.dim()));
    }
    out.append(part);
  }
  return out;
}

EmbeddingMatrix load_side_vectors(const fs::path& path, const std::vector<Window>& windows,
                                  RunContext& ctx) {
  if (!fs::exists(path)) throw DataError("cannot open " + path.string() + " (run the embed stage first)");
  ctx.manifest.record_input(path);
  ctx.manifest.record_input(sidecar_path(path.string()));
  std::vector<std::string> ids;
  EmbeddingMatrix m = load_matrix_with_ids(path.string(), sidecar_path(path.string()), ids);
  if (ids.size() != windows.size()) {
    throw DataError(path.string() + ": count mismatch with the window dump (" +
                    std::to_string(ids.size()) + " vs " + std::to_string(windows.size()) + ")");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] != window_id(windows[i])) {
      throw DataError(path.string() + ": row " + std::to_string(i) + " is '" + ids[i] +
                      "', window dump has '" + window_id(windows[i]) + "'");
    }
  }
  m.validate(false);
  return m;
}

std::string join_sentences(const Document& doc, Span span) {
  std::string text;
  for (std::size_t i = span.begin; i < span.end(); ++i) {
    if (i > span.begin) text.push_back(' ');
    text += doc.sentences[i].text;
  }
  return text;
}

// Sentence interval covered by window positions [first, last] of one document.
Span region_of(const std::map<std::string, std::vector<const Window*>>& by_doc,
               const std::string& doc_id, IndexRange positions) {
  const auto it = by_doc.find(doc_id);
  if (it == by_doc.end() || positions.last >= it->second.size()) {
    throw DataError("cluster references window " + doc_id + "#" + std::to_string(positions.last) +
                    " that is not in the window dump");
  }
  const std::size_t first = it->second[positions.first]->start;
  std::size_t last = first;
  for (std::size_t p = positions.first; p <= positions.last; ++p) {
    last = std::max(last, it->second[p]->end);
  }
  return {first, last - first + 1};
}

std::map<std::string, std::vector<const Window*>> index_windows(const std::vector<Window>& windows) {
  std::map<std::string, std::vector<const Window*>> by_doc;
  for (const auto& w : windows) {
    auto& list = by_doc[w.doc_id];
    if (w.position != list.size()) {
      throw DataError("window dump for '" + w.doc_id + "' is not in position order");
    }
    list.push_back(&w);
  }
  return by_doc;
}

std::vector<AlignedPair> read_aligned(const fs::path& path, RunContext& ctx) {
  auto in = open_input(path, ctx);
  try {
    return read_dataset_jsonl(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

const std::string& pool_text(const CorpusStore& store, const SegmentId& id, bool pivot) {
  const Document& doc = store.at(id.doc_id);
  const Sentence& s = store.resolve(id);
  if (pivot && doc.pivot) return (*doc.pivot)[id.index];
  return s.text;
}

}  // namespace

void stage_ingest(const PipelineConfig& cfg, RunContext& ctx) {
  if (cfg.corpora.empty()) throw ConfigError("no corpora configured");
  ensure_output_dir(cfg);
  for (const auto& [lang, path] : cfg.corpora) {
    const CorpusStore store = load_lang(cfg, lang, ctx);
    const fs::path out = cfg.output_dir / ("corpus." + lang + ".jsonl");
    write_file(out, [&](std::ostream& os) { write_corpus(os, store); });
    logger(ctx) << "ingest: " << lang << ": " << store.document_count() << " documents, "
             << store.sentence_count() << " sentences\n";
  }
}

void stage_windows(const PipelineConfig& cfg, RunContext& ctx) {
  ensure_output_dir(cfg);
  const Sides sides = load_sides(cfg, ctx);
  const auto src = build_corpus_windows(sides.src, cfg.windowing);
  const auto tgt = sides.same ? src : build_corpus_windows(sides.tgt(), cfg.windowing);
  write_file(out_path(cfg, artifact::kSrcWindows), [&](std::ostream& os) { write_windows_tsv(os, src); });
  write_file(out_path(cfg, artifact::kTgtWindows), [&](std::ostream& os) { write_windows_tsv(os, tgt); });
  logger(ctx) << "windows: " << src.size() << " source, " << tgt.size() << " target\n";
}

void stage_embed(const PipelineConfig& cfg, RunContext& ctx) {
  ensure_output_dir(cfg);
  const Sides sides = load_sides(cfg, ctx);
  const auto provider = make_provider(cfg.provider);
  const auto embed_side = [&](const char* windows_name, const char* vectors_name,
                              const CorpusStore& store) {
    const auto windows = read_windows(out_path(cfg, windows_name), store, cfg.windowing, ctx);
    std::vector<std::string> texts;
    std::vector<std::string> ids;
    texts.reserve(windows.size());
    for (const auto& w : windows) {
      texts.push_back(w.text);
      ids.push_back(window_id(w));
    }
    const EmbeddingMatrix m = embed_parallel(*provider, cfg.provider.batch_size, texts, ctx.threads);
    m.validate(cfg.provider.normalize);
    const fs::path path = out_path(cfg, vectors_name);
    store_matrix(m, path.string());
    store_ids(ids, sidecar_path(path.string()));
    logger(ctx) << "embed: " << m.count() << " x " << m.dim() << " -> " << path.filename().string() << "\n";
  };
  embed_side(artifact::kSrcWindows, artifact::kSrcVectors, sides.src);
  embed_side(artifact::kTgtWindows, artifact::kTgtVectors, sides.tgt());
}

void stage_mine(const PipelineConfig& cfg, RunContext& ctx) {
  ensure_output_dir(cfg);
  const Sides sides = load_sides(cfg, ctx);
  const auto src_w = read_windows(out_path(cfg, artifact::kSrcWindows), sides.src, cfg.windowing, ctx);
  const auto tgt_w = read_windows(out_path(cfg, artifact::kTgtWindows), sides.tgt(), cfg.windowing, ctx);
  const auto src_m = load_side_vectors(out_path(cfg, artifact::kSrcVectors), src_w, ctx);
  const auto tgt_m = load_side_vectors(out_path(cfg, artifact::kTgtVectors), tgt_w, ctx);
  if (cfg.provider.normalize) {
    src_m.validate(true);
    tgt_m.validate(true);
  }
  MiningParams params = cfg.mining;
  params.knn.threads = ctx.threads;
  const auto pairs = mine_pairs({&src_w, &src_m}, {&tgt_w, &tgt_m}, params);
  write_file(out_path(cfg, artifact::kPairs), [&](std::ostream& os) { write_pairs_tsv(os, pairs); });
  logger(ctx) << "mine: " << pairs.size() << " candidate pairs\n";
}

void stage_cluster(const PipelineConfig& cfg, RunContext& ctx) {
  ensure_output_dir(cfg);
  auto in = open_input(out_path(cfg, artifact::kPairs), ctx);
  const auto pairs = read_pairs_tsv(in);
  ClusterParams params = cfg.clustering;
  params.threads = ctx.threads;
  const auto clusters = cluster_pairs(pairs, params);
  write_file(out_path(cfg, artifact::kClusters),
             [&](std::ostream& os) { write_clusters_jsonl(os, clusters); });
  logger(ctx) << "cluster: " << clusters.size() << " clusters from " << pairs.size() << " pairs\n";
}

void stage_align(const PipelineConfig& cfg, RunContext& ctx) {
  ensure_output_dir(cfg);
  const Sides sides = load_sides(cfg, ctx);
  const auto src_w = read_windows(out_path(cfg, artifact::kSrcWindows), sides.src, cfg.windowing, ctx);
  const auto tgt_w = read_windows(out_path(cfg, artifact::kTgtWindows), sides.tgt(), cfg.windowing, ctx);
  auto in = open_input(out_path(cfg, artifact::kClusters), ctx);
  const auto clusters = read_clusters_jsonl(in);
  const auto src_index = index_windows(src_w);
  const auto tgt_index = index_windows(tgt_w);
  const auto provider = make_provider(cfg.provider);

  const auto segment = [&](const Document& doc, std::size_t i) -> const std::string& {
    if (cfg.align_text == WindowSource::Pivot) {
      if (!doc.pivot) throw DataError("document '" + doc.doc_id + "' has no pivot translation");
      return (*doc.pivot)[i];
    }
    return doc.sentences[i].text;
  };

  std::vector<std::vector<AlignedPair>> per_cluster(clusters.size());
  parallel_for(clusters.size(), ctx.threads, [&](std::size_t c) {
    const Cluster& cl = clusters[c];
    const Document& sdoc = sides.src.at(cl.src_doc);
    const Document& tdoc = sides.tgt().at(cl.tgt_doc);
    const Span sr = region_of(src_index, cl.src_doc, cl.x_range);
    const Span tr = region_of(tgt_index, cl.tgt_doc, cl.y_range);
    std::vector<std::string> s_texts, t_texts;
    for (std::size_t i = sr.begin; i < sr.end(); ++i) s_texts.push_back(segment(sdoc, i));
    for (std::size_t i = tr.begin; i < tr.end(); ++i) t_texts.push_back(segment(tdoc, i));
    const auto beads = align_region(s_texts, t_texts, *provider, cfg.provider.batch_size, cfg.align);
    for (const auto& run : filter_alignment(beads, cfg.ma_window, cfg.ma_threshold)) {
      for (const Bead& b : run) {
        if (b.is_gap()) continue;
        AlignedPair p;
        p.src_doc = cl.src_doc;
        p.src_lang = sdoc.lang.code();
        p.src_span = {sr.begin + b.src.begin, b.src.count};
        p.src_text = join_sentences(sdoc, p.src_span);
        p.tgt_doc = cl.tgt_doc;
        p.tgt_lang = tdoc.lang.code();
        p.tgt_span = {tr.begin + b.tgt.begin, b.tgt.count};
        p.tgt_text = join_sentences(tdoc, p.tgt_span);
        p.score = b.score;
        p.cluster = c;
        per_cluster[c].push_back(std::move(p));
      }
    }
  });
  std::size_t total = 0;
  write_file(out_path(cfg, artifact::kAligned), [&](std::ostream& os) {
    for (const auto& list : per_cluster) {
      write_dataset_jsonl(os, list);
      total += list.size();
    }
  });
  logger(ctx) << "align: " << total << " aligned pairs from " << clusters.size() << " clusters\n";
}

void stage_export(const PipelineConfig& cfg, RunContext& ctx) {
  ensure_output_dir(cfg);
  auto pairs = read_aligned(out_path(cfg, artifact::kAligned), ctx);
  std::vector<AlignedPair> kept;
  std::size_t n_dropped = 0;
  for (auto& p : pairs) {
    if (ratio_filter(p, cfg.ratio).keep) {
      kept.push_back(std::move(p));
    } else {
      ++n_dropped;
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const AlignedPair& a, const AlignedPair& b) {
    return std::tie(a.src_doc, a.src_span.begin, a.src_span.count, a.tgt_doc, a.tgt_span.begin,
                    a.tgt_span.count) < std::tie(b.src_doc, b.src_span.begin, b.src_span.count,
                                                 b.tgt_doc, b.tgt_span.begin, b.tgt_span.count);
  });
  const std::size_t before = kept.size();
  kept.erase(std::unique(kept.begin(), kept.end(),
                         [](const AlignedPair& a, const AlignedPair& b) {
                           return a.src_doc == b.src_doc && a.src_span == b.src_span &&
                                  a.tgt_doc == b.tgt_doc && a.tgt_span == b.tgt_span;
                         }),
             kept.end());
  write_file(out_path(cfg, artifact::kDatasetTsv), [&](std::ostream& os) { write_dataset_tsv(os, kept); });
  write_file(out_path(cfg, artifact::kDatasetJsonl),
             [&](std::ostream& os) { write_dataset_jsonl(os, kept); });
  logger(ctx) << "export: " << kept.size() << " pairs kept, " << n_dropped << " dropped by length ratio, "
           << (before - kept.size()) << " duplicates removed\n";
}

void stage_mine_all(const PipelineConfig& cfg, RunContext& ctx) {
  stage_windows(cfg, ctx);
  stage_embed(cfg, ctx);
  stage_mine(cfg, ctx);
  stage_cluster(cfg, ctx);
  stage_align(cfg, ctx);
  stage_export(cfg, ctx);
}

void stage_eval(const PipelineConfig& cfg, RunContext& ctx) {
  ensure_output_dir(cfg);
  if (cfg.eval.tasks.empty()) throw ConfigError("eval.tasks is empty");
  if (cfg.eval.strategies.empty()) throw ConfigError("eval.strategies is empty");
  if (cfg.eval.weights.empty()) throw ConfigError("eval.weights is empty");
  ctx.manifest.set_seed("eval.seed", cfg.eval.seed);

  CorpusStore store;
  std::map<std::string, std::vector<SegmentId>> by_lang;
  for (const auto& [lang, path] : cfg.corpora) {
    if (!fs::exists(path)) throw DataError("corpus file not found: " + path.string());
    ctx.manifest.record_input(path);
    std::ifstream in(path, std::ios::binary);
    try {
      ingest_corpus_into(store, in, LanguageTag(lang));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  for (const auto& doc : store.documents()) {
    auto& ids = by_lang[doc.lang.code()];
    for (const auto& s : doc.sentences) ids.push_back({doc.doc_id, s.index});
  }
  const auto base_pool = sample_negatives(by_lang, cfg.eval.pool_total, cfg.eval.weights, cfg.eval.seed);
  logger(ctx) << "eval: negative pool of " << base_pool.size() << " sentences\n";

  const bool need_dense = std::any_of(cfg.eval.strategies.begin(), cfg.eval.strategies.end(),
                                      [](const std::string& s) { return s.starts_with("dense"); });
  std::unique_ptr<EmbeddingProvider> provider;
  if (need_dense) provider = make_provider(cfg.provider);

  std::vector<ReportRow> rows;
  for (const auto& task : cfg.eval.tasks) {
    auto in = open_input(task.path, ctx);
    const auto queries = read_task_jsonl(in);
    std::vector<SegmentId> golds;
    for (const auto& q : queries) {
      store.resolve(q.gold);
      golds.push_back(q.gold);
    }
    std::vector<SegmentId> pool = base_pool;
    add_golds(pool, golds);
    std::map<SegmentId, std::size_t> position;
    for (std::size_t i = 0; i < pool.size(); ++i) position.emplace(pool[i], i);
    std::vector<std::size_t> gold_pos;
    for (const auto& g : golds) gold_pos.push_back(position.at(g));

    for (const auto& strategy : cfg.eval.strategies) {
      const bool pivot = strategy.ends_with("-pivot");
      const auto query_text = [&](const EvalQuery& q) -> const std::string& {
        return pivot && q.pivot ? *q.pivot : q.text;
      };
      std::vector<std::vector<std::size_t>> rankings(queries.size());
      if (strategy.starts_with("bm25")) {
        std::vector<std::vector<std::string>> docs;
        docs.reserve(pool.size());
        for (const auto& id : pool) {
          const Document& doc = store.at(id.doc_id);
          const std::string lang = pivot && doc.pivot ? "en" : doc.lang.code();
          docs.push_back(tokenize_for_bm25(pool_text(store, id, pivot), lang));
        }
        const Bm25Index index(docs, cfg.eval.bm25);
        parallel_for(queries.size(), ctx.threads, [&](std::size_t q) {
          const std::string lang = pivot && queries[q].pivot ? "en" : queries[q].lang;
          rankings[q] = index.top_k(tokenize_for_bm25(query_text(queries[q]), lang), 10);
        });
      } else {
        std::vector<std::string> texts;
        texts.reserve(pool.size());
        for (const auto& id : pool) texts.push_back(pool_text(store, id, pivot));
        const auto pool_m = embed_parallel(*provider, cfg.provider.batch_size, texts, ctx.threads);
        std::vector<std::string> qtexts;
        for (const auto& q : queries) qtexts.push_back(query_text(q));
        const auto query_m = embed_parallel(*provider, cfg.provider.batch_size, qtexts, ctx.threads);
        parallel_for(queries.size(), ctx.threads, [&](std::size_t q) {
          rankings[q] = dense_top_k(query_m.row(q), pool_m, 10);
        });
      }
      rows.push_back({task.name, strategy, precision_at_k(rankings, gold_pos)});
      logger(ctx) << "eval: " << task.name << " / " << strategy << ": P@1 "
               << format_percent(rows.back().metrics.p_at[1]) << " P@5 "
               << format_percent(rows.back().metrics.p_at[5]) << " P@10 "
               << format_percent(rows.back().metrics.p_at[10]) << "\n";
    }
  }
  write_file(out_path(cfg, artifact::kEvalReport), [&](std::ostream& os) { write_report_tsv(os, rows); });
}

void stage_audit_sample(const PipelineConfig& cfg, RunContext& ctx,
                        const std::optional<fs::path>& dataset) {
  ensure_output_dir(cfg);
  ctx.manifest.set_seed("audit.seed", cfg.audit.seed);
  const auto pairs = read_aligned(dataset.value_or(out_path(cfg, artifact::kDatasetJsonl)), ctx);
  const auto sample = sample_pairs_for_audit(pairs, cfg.audit.n, cfg.audit.seed);
  write_file(out_path(cfg, artifact::kAuditSheet), [&](std::ostream& os) { write_audit_tsv(os, sample); });
  logger(ctx) << "audit-sample: " << sample.size() << " of " << pairs.size() << " pairs\n";
}

void stage_audit_report(const PipelineConfig& cfg, RunContext& ctx,
                        const std::optional<fs::path>& labels) {
  ensure_output_dir(cfg);
  auto in = open_input(labels.value_or(out_path(cfg, artifact::kAuditSheet)), ctx);
  const auto records = read_audit_tsv(in, cfg.audit.annotator);
  const auto rates = report_rates(records);
  write_file(out_path(cfg, artifact::kAuditRates), [&](std::ostream& os) { write_rates_tsv(os, rates); });
  write_rates_tsv(logger(ctx), rates);
}

void stage_stats(const PipelineConfig& cfg, RunContext& ctx, const std::optional<fs::path>& dataset) {
  ensure_output_dir(cfg);
  CorpusStore store;
  for (const auto& [lang, path] : cfg.corpora) {
    if (!fs::exists(path)) throw DataError("corpus file not found: " + path.string());
    ctx.manifest.record_input(path);
    std::ifstream in(path, std::ios::binary);
    try {
      ingest_corpus_into(store, in, LanguageTag(lang));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  const auto report = corpus_stats(store);
  write_file(out_path(cfg, artifact::kStats), [&](std::ostream& os) { write_stats_tsv(os, report); });
  write_stats_tsv(logger(ctx), report);
  if (dataset) {
    const auto pairs = read_aligned(*dataset, ctx);
    std::map<std::string, std::size_t> per_pair;
    for (const auto& p : pairs) per_pair[p.src_lang + "-" + p.tgt_lang] += 1;
    write_file(out_path(cfg, artifact::kDatasetStats), [&](std::ostream& os) {
      os << "language_pair\tpairs\n";
      for (const auto& [key, n] : per_pair) os << key << '\t' << n << '\n';
      os << "total\t" << pairs.size() << '\n';
    });
    logger(ctx) << "dataset: " << pairs.size() << " pairs\n";
  }
}

}  // namespace parmine::cli
