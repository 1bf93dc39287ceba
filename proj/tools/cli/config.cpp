#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "parmine/error.hpp"

namespace parmine::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Keys whose contents are user-defined maps or lists rather than fixed fields.
const std::set<std::string> kFreeForm = {"corpora", "eval.weights", "eval.tasks",
                                         "eval.strategies", "alignment.ratio_bounds"};

std::string type_name(const json& v) {
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  return v.type_name();
}

void merge(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object()) throw ConfigError("config section '" + prefix + "' must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    json& dst = base[key];
    if (kFreeForm.contains(path)) {
      if (value.type() != dst.type()) {
        throw ConfigError("config key '" + path + "' must be " + type_name(dst));
      }
      dst = value;
      continue;
    }
    if (dst.is_object()) {
      merge(dst, value, path);
      continue;
    }
    const bool ok = (dst.is_number_integer() && value.is_number_integer() &&
                     (value.is_number_unsigned() || value.get<long long>() >= 0)) ||
                    (dst.is_number_float() && value.is_number()) ||
                    (dst.is_boolean() && value.is_boolean()) ||
                    (dst.is_string() && value.is_string());
    if (!ok) {
      throw ConfigError("config key '" + path + "' must be " +
                        (dst.is_number_integer() ? std::string("a non-negative integer") : type_name(dst)) +
                        ", got " + type_name(value));
    }
    dst = value;
  }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base_dir / path).lexically_normal();
}

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace

const json& default_config() {
  static const json defaults = json::parse(R"({
    "corpora": {},
    "output_dir": "out",
    "provider": {
      "kind": "mock", "dim": 256, "location": "", "batch_size": 64,
      "normalize": true, "timeout_ms": 30000, "max_retries": 3
    },
    "windowing": {"min_len": 128, "stride": 1, "source": "pivot"},
    "mining": {
      "source_lang": "", "target_lang": "", "k": 5, "min_sim": 0.65, "symmetric": true
    },
    "clustering": {"cell_size": 10, "min_cluster_size": 3},
    "alignment": {
      "gap_penalty": 0.15, "ma_window": 3, "threshold": 0.5, "max_region": 512,
      "text_source": "original", "ratio_bounds": {}
    },
    "eval": {
      "pool_total": 400412, "weights": {}, "seed": 0, "tasks": [], "strategies": ["bm25-pivot"],
      "bm25": {"k1": 1.5, "b": 0.75}
    },
    "audit": {"n": 100, "seed": 0, "annotator": "annotator"}
  })");
  return defaults;
}

void apply_override(json& doc, const std::string& dotted_path, const std::string& value) {
  if (dotted_path.empty()) throw ConfigError("empty override key");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted_path.find('.', start);
    const std::string key = dotted_path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("bad override key '" + dotted_path + "'");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("override '" + dotted_path + "' descends into a non-object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

PipelineConfig build_config(const json& user, const fs::path& base_dir) {
  json merged = default_config();
  merge(merged, user, "");

  PipelineConfig cfg;
  for (const auto& [lang, path] : merged["corpora"].items()) {
    require(path.is_string(), "corpora." + lang + " must be a path string");
    LanguageTag tag = [&] {
      try {
        return LanguageTag(lang);
      } catch (const Error& e) {
        throw ConfigError(std::string("corpora: ") + e.what());
      }
    }();
    cfg.corpora[tag.code()] = resolve(base_dir, path.get<std::string>());
    merged["corpora"][lang] = cfg.corpora[tag.code()].string();
  }
  cfg.output_dir = resolve(base_dir, merged["output_dir"].get<std::string>());
  merged["output_dir"] = cfg.output_dir.string();

  const json& p = merged["provider"];
  cfg.provider.kind = parse_provider_kind(p["kind"].get<std::string>());
  cfg.provider.dim = p["dim"].get<std::size_t>();
  cfg.provider.location = p["location"].get<std::string>();
  cfg.provider.batch_size = p["batch_size"].get<std::size_t>();
  cfg.provider.normalize = p["normalize"].get<bool>();
  cfg.provider.timeout_ms = p["timeout_ms"].get<int>();
  cfg.provider.max_retries = p["max_retries"].get<int>();
  require(cfg.provider.dim >= 1, "provider.dim must be >= 1");
  require(cfg.provider.batch_size >= 1, "provider.batch_size must be >= 1");
  require(cfg.provider.timeout_ms >= 1, "provider.timeout_ms must be >= 1");
  if (cfg.provider.kind == ProviderKind::File) {
    require(!cfg.provider.location.empty(), "provider.location is required for kind=file");
    cfg.provider.location = resolve(base_dir, cfg.provider.location).string();
    merged["provider"]["location"] = cfg.provider.location;
  }
  if (cfg.provider.kind == ProviderKind::Remote) {
    require(!cfg.provider.location.empty(), "provider.location is required for kind=remote");
  }

  const json& w = merged["windowing"];
  cfg.windowing.min_len = w["min_len"].get<std::size_t>();
  cfg.windowing.stride = w["stride"].get<std::size_t>();
  cfg.windowing.source = parse_window_source(w["source"].get<std::string>());
  require(cfg.windowing.min_len >= 1, "windowing.min_len must be >= 1");
  require(cfg.windowing.stride >= 1, "windowing.stride must be >= 1");

  const json& m = merged["mining"];
  cfg.source_lang = m["source_lang"].get<std::string>();
  cfg.target_lang = m["target_lang"].get<std::string>();
  cfg.mining.knn.k = m["k"].get<std::size_t>();
  cfg.mining.knn.min_sim = m["min_sim"].get<double>();
  cfg.mining.symmetric = m["symmetric"].get<bool>();
  cfg.mining.exclude_same_doc = !cfg.source_lang.empty() && cfg.source_lang == cfg.target_lang;
  require(cfg.mining.knn.k >= 1, "mining.k must be >= 1");
  require(cfg.mining.knn.min_sim >= -1.0 && cfg.mining.knn.min_sim <= 1.0,
          "mining.min_sim must be in [-1, 1]");

  const json& c = merged["clustering"];
  cfg.clustering.cell_size = c["cell_size"].get<std::size_t>();
  cfg.clustering.min_cluster_size = c["min_cluster_size"].get<std::size_t>();
  require(cfg.clustering.cell_size >= 1, "clustering.cell_size must be >= 1");
  require(cfg.clustering.min_cluster_size >= 1, "clustering.min_cluster_size must be >= 1");

  const json& a = merged["alignment"];
  cfg.align.gap_penalty = a["gap_penalty"].get<double>();
  cfg.align.max_region = a["max_region"].get<std::size_t>();
  cfg.ma_window = a["ma_window"].get<std::size_t>();
  cfg.ma_threshold = a["threshold"].get<double>();
  cfg.align_text = parse_window_source(a["text_source"].get<std::string>());
  require(cfg.align.gap_penalty >= 0.0, "alignment.gap_penalty must be >= 0");
  require(cfg.align.max_region >= 1, "alignment.max_region must be >= 1");
  require(cfg.ma_window >= 1 && cfg.ma_window % 2 == 1, "alignment.ma_window must be odd and >= 1");
  require(cfg.ma_threshold >= -1.0 && cfg.ma_threshold <= 1.0, "alignment.threshold must be in [-1, 1]");
  for (const auto& [pair, bounds] : a["ratio_bounds"].items()) {
    const std::size_t dash = pair.find('-');
    require(dash != std::string::npos && dash > 0 && dash + 1 < pair.size(),
            "alignment.ratio_bounds keys must look like \"src-tgt\", got \"" + pair + "\"");
    require(bounds.is_array() && bounds.size() == 2 && bounds[0].is_number() && bounds[1].is_number(),
            "alignment.ratio_bounds." + pair + " must be [lo, hi]");
    cfg.ratio.set(pair.substr(0, dash), pair.substr(dash + 1),
                  {bounds[0].get<double>(), bounds[1].get<double>()});
  }

  const json& e = merged["eval"];
  cfg.eval.pool_total = e["pool_total"].get<std::size_t>();
  cfg.eval.seed = e["seed"].get<std::uint64_t>();
  for (const auto& [lang, weight] : e["weights"].items()) {
    require(weight.is_number() && weight.get<double>() >= 0.0,
            "eval.weights." + lang + " must be a non-negative number");
    cfg.eval.weights[lang] = weight.get<double>();
  }
  for (std::size_t i = 0; i < e["tasks"].size(); ++i) {
    const json& t = e["tasks"][i];
    const std::string where = "eval.tasks[" + std::to_string(i) + "]";
    require(t.is_object() && t.contains("name") && t["name"].is_string() && t.contains("path") &&
                t["path"].is_string(),
            where + " needs string fields \"name\" and \"path\"");
    TaskSpec spec;
    spec.name = t["name"].get<std::string>();
    spec.path = resolve(base_dir, t["path"].get<std::string>());
    spec.type = parse_task_type(t.value("type", std::string("crosslingual-parallel")));
    merged["eval"]["tasks"][i]["path"] = spec.path.string();
    cfg.eval.tasks.push_back(std::move(spec));
  }
  static const std::set<std::string> kStrategies = {"bm25", "bm25-pivot", "dense", "dense-pivot"};
  for (const auto& s : e["strategies"]) {
    require(s.is_string() && kStrategies.contains(s.get<std::string>()),
            "eval.strategies entries must be one of bm25, bm25-pivot, dense, dense-pivot");
    cfg.eval.strategies.push_back(s.get<std::string>());
  }
  cfg.eval.bm25.k1 = e["bm25"]["k1"].get<double>();
  cfg.eval.bm25.b = e["bm25"]["b"].get<double>();
  require(cfg.eval.bm25.k1 >= 0.0, "eval.bm25.k1 must be >= 0");
  require(cfg.eval.bm25.b >= 0.0 && cfg.eval.bm25.b <= 1.0, "eval.bm25.b must be in [0, 1]");

  const json& au = merged["audit"];
  cfg.audit.n = au["n"].get<std::size_t>();
  cfg.audit.seed = au["seed"].get<std::uint64_t>();
  cfg.audit.annotator = au["annotator"].get<std::string>();

  cfg.snapshot = std::move(merged);
  return cfg;
}

PipelineConfig load_config(const fs::path& path,
                           const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config not found: " + path.string());
  json user;
  try {
    user = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : overrides) apply_override(user, key, value);
  return build_config(user, fs::absolute(path).parent_path());
}

}  // namespace parmine::cli
