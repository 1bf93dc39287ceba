#include "parmine/clustering.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <tuple>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "parmine/error.hpp"
#include "parmine/parallel.hpp"

namespace parmine {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned> rank_;
};

struct CellKey {
  std::size_t cx;
  std::size_t cy;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    return std::hash<std::size_t>{}(k.cx * 0x9E3779B97F4A7C15ULL ^ k.cy);
  }
};

Cluster make_cluster(const std::string& src_doc, const std::string& tgt_doc,
                     std::vector<PairPoint> points) {
  std::sort(points.begin(), points.end(), [](const PairPoint& a, const PairPoint& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  Cluster c;
  c.src_doc = src_doc;
  c.tgt_doc = tgt_doc;
  c.x_range = {points.front().x, points.front().x};
  c.y_range = {points.front().y, points.front().y};
  double sum = 0.0;
  for (const auto& p : points) {
    c.x_range.first = std::min(c.x_range.first, p.x);
    c.x_range.last = std::max(c.x_range.last, p.x);
    c.y_range.first = std::min(c.y_range.first, p.y);
    c.y_range.last = std::max(c.y_range.last, p.y);
    sum += p.sim;
  }
  c.mean_sim = sum / static_cast<double>(points.size());
  c.n_points = points.size();
  c.points = std::move(points);
  return c;
}

}  // namespace

bool cells_adjacent(const PairPoint& a, const PairPoint& b, std::size_t cell_size) {
  const auto cell_gap = [&](std::size_t u, std::size_t v) {
    const std::size_t cu = u / cell_size;
    const std::size_t cv = v / cell_size;
    return cu > cv ? cu - cv : cv - cu;
  };
  return cell_gap(a.x, b.x) <= 1 && cell_gap(a.y, b.y) <= 1;
}

std::vector<Cluster> cluster_points(const std::string& src_doc, const std::string& tgt_doc,
                                    const std::vector<PairPoint>& points,
                                    const ClusterParams& params) {
  if (params.cell_size < 1) throw ConfigError("clustering.cell_size must be >= 1");
  if (params.min_cluster_size < 1) throw ConfigError("clustering.min_cluster_size must be >= 1");
  if (points.empty()) return {};

  // Points sharing a cell are connected, so union-find runs over cells: each
  // occupied cell is joined with its occupied 8-neighbors.
  std::unordered_map<CellKey, std::size_t, CellHash> cell_of;
  std::vector<std::size_t> point_cell(points.size());
  std::vector<CellKey> cells;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CellKey key{points[i].x / params.cell_size, points[i].y / params.cell_size};
    const auto [it, inserted] = cell_of.try_emplace(key, cells.size());
    if (inserted) cells.push_back(key);
    point_cell[i] = it->second;
  }
  DisjointSets sets(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const CellKey k = cells[c];
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        if ((dx < 0 && k.cx == 0) || (dy < 0 && k.cy == 0)) continue;
        const auto it = cell_of.find({k.cx + dx, k.cy + dy});
        if (it != cell_of.end()) sets.unite(c, it->second);
      }
    }
  }

  std::map<std::size_t, std::vector<PairPoint>> components;
  for (std::size_t i = 0; i < points.size(); ++i) {
    components[sets.find(point_cell[i])].push_back(points[i]);
  }
  std::vector<Cluster> clusters;
  for (auto& [root, members] : components) {
    if (members.size() < params.min_cluster_size) continue;
    clusters.push_back(make_cluster(src_doc, tgt_doc, std::move(members)));
  }
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    const auto key = [](const Cluster& c) {
      return std::tie(c.x_range.first, c.y_range.first, c.points.front().x, c.points.front().y);
    };
    return key(a) < key(b);
  });
  return clusters;
}

std::vector<Cluster> cluster_pairs(const std::vector<PairRecord>& pairs,
                                   const ClusterParams& params) {
  std::map<std::pair<std::string, std::string>, std::vector<PairPoint>> planes;
  for (const auto& p : pairs) planes[{p.src_doc, p.tgt_doc}].push_back({p.src_pos, p.tgt_pos, p.sim});

  std::vector<const std::pair<const std::pair<std::string, std::string>, std::vector<PairPoint>>*>
      work;
  for (const auto& entry : planes) work.push_back(&entry);
  std::vector<std::vector<Cluster>> per_plane(work.size());
  ClusterParams single = params;
  single.threads = 1;
  parallel_for(work.size(), params.threads, [&](std::size_t i) {
    const auto& [docs, points] = *work[i];
    per_plane[i] = cluster_points(docs.first, docs.second, points, single);
  });
  std::vector<Cluster> clusters;
  for (auto& plane : per_plane) {
    std::move(plane.begin(), plane.end(), std::back_inserter(clusters));
  }
  return clusters;
}

void write_clusters_jsonl(std::ostream& out, const std::vector<Cluster>& clusters) {
  for (const auto& c : clusters) {
    nlohmann::ordered_json j;
    j["src_doc"] = c.src_doc;
    j["tgt_doc"] = c.tgt_doc;
    j["x_range"] = {c.x_range.first, c.x_range.last};
    j["y_range"] = {c.y_range.first, c.y_range.last};
    j["n_points"] = c.n_points;
    j["mean_sim"] = c.mean_sim;
    out << j.dump() << '\n';
  }
}

std::vector<Cluster> read_clusters_jsonl(std::istream& in) {
  std::vector<Cluster> clusters;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Cluster c;
      c.src_doc = j.at("src_doc").get<std::string>();
      c.tgt_doc = j.at("tgt_doc").get<std::string>();
      const auto& xr = j.at("x_range");
      const auto& yr = j.at("y_range");
      c.x_range = {xr.at(0).get<std::size_t>(), xr.at(1).get<std::size_t>()};
      c.y_range = {yr.at(0).get<std::size_t>(), yr.at(1).get<std::size_t>()};
      c.mean_sim = j.at("mean_sim").get<double>();
      c.n_points = j.at("n_points").get<std::size_t>();
      if (c.x_range.first > c.x_range.last || c.y_range.first > c.y_range.last) {
        throw DataError("inverted range");
      }
      clusters.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("clusters line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("clusters line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return clusters;
}

}  // namespace parmine
