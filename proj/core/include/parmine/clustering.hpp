#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "parmine/knn.hpp"

namespace parmine {

struct PairPoint {
  std::size_t x = 0;  // source window position
  std::size_t y = 0;  // target window position
  double sim = 0.0;

  friend bool operator==(const PairPoint&, const PairPoint&) = default;
};

struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive

  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct Cluster {
  std::string src_doc;
  std::string tgt_doc;
  std::vector<PairPoint> points;  // sorted by (x, y); empty when read from a dump
  std::size_t n_points = 0;
  IndexRange x_range;
  IndexRange y_range;
  double mean_sim = 0.0;
};

struct ClusterParams {
  std::size_t cell_size = 10;
  std::size_t min_cluster_size = 3;
  std::size_t threads = 1;
};

/// Connected components of one (source doc, target doc) plane. Points are
/// bucketed into cells (x / cell_size, y / cell_size); points whose cells are
/// equal or 8-neighbors are connected. Components with fewer than
/// min_cluster_size points are dropped. Result sorted by (x_range.first,
/// y_range.first).
std::vector<Cluster> cluster_points(const std::string& src_doc, const std::string& tgt_doc,
                                    const std::vector<PairPoint>& points,
                                    const ClusterParams& params);

/// Groups pair records by document pair and clusters every plane. Result
/// sorted by (src_doc, tgt_doc, x_range.first, y_range.first).
std::vector<Cluster> cluster_pairs(const std::vector<PairRecord>& pairs,
                                   const ClusterParams& params);

/// Cell-adjacency predicate shared by the hash grid.
bool cells_adjacent(const PairPoint& a, const PairPoint& b, std::size_t cell_size);

/// JSONL: {"src_doc","tgt_doc","x_range":[a,b],"y_range":[c,d],"n_points","mean_sim"}.
void write_clusters_jsonl(std::ostream& out, const std::vector<Cluster>& clusters);

/// Reads the cluster dump; member points are not part of it.
std::vector<Cluster> read_clusters_jsonl(std::istream& in);

}  // namespace parmine
