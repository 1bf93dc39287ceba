#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "parmine/embedding.hpp"
#include "parmine/error.hpp"

namespace parmine {
namespace {

using json = nlohmann::json;

// In-process stand-in for the embedding sidecar speaking the same wire format.
class FakeSidecar {
 public:
  FakeSidecar() {
    server_.Post("/v1/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (failures_left_ > 0) {
        --failures_left_;
        res.status = 503;
        res.set_content(R"({"error":"model not loaded"})", "application/json");
        return;
      }
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error&) {
        res.status = 400;
        return;
      }
      if (!body.contains("texts") || !body["texts"].is_array() || body["texts"].empty()) {
        res.status = 400;
        return;
      }
      last_normalize_ = body.value("normalize", true);
      std::vector<std::string> texts = body["texts"].get<std::vector<std::string>>();
      const MockProvider mock(dim_, last_normalize_);
      const auto m = mock.embed_batch(texts);
      json out = {{"dim", dim_}, {"model", "mock"}, {"vectors", json::array()}};
      for (std::size_t i = 0; i < m.count(); ++i) {
        out["vectors"].push_back(std::vector<float>(m.row(i).begin(), m.row(i).end()));
      }
      if (short_reply_) out["vectors"].erase(out["vectors"].begin());
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeSidecar() {
    server_.stop();
    thread_.join();
  }

  ProviderConfig config() const {
    ProviderConfig cfg;
    cfg.kind = ProviderKind::Remote;
    cfg.location = "http://127.0.0.1:" + std::to_string(port_);
    cfg.dim = dim_;
    cfg.batch_size = 3;
    cfg.timeout_ms = 2000;
    cfg.max_retries = 2;
    return cfg;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::size_t dim_ = 256;
  std::atomic<int> requests_{0};
  std::atomic<int> failures_left_{0};
  std::atomic<bool> last_normalize_{true};
  bool short_reply_ = false;
};

const std::vector<std::string> kTexts = {"abc", "sarva dharma", "無我", "धर्मः", "x", "abc", "tail"};

TEST(RemoteProvider, MatchesInProcessMockBitForBit) {
  FakeSidecar sidecar;
  const auto remote = embed_texts(sidecar.config(), kTexts);
  const auto local = embed_texts(MockProvider(256, true), 64, kTexts);
  EXPECT_EQ(remote, local);
  EXPECT_EQ(sidecar.requests_, 3);  // batches of 3, 3, 1
}

TEST(RemoteProvider, SendsNormalizeFlag) {
  FakeSidecar sidecar;
  auto cfg = sidecar.config();
  cfg.normalize = false;
  const auto remote = embed_texts(cfg, kTexts);
  EXPECT_FALSE(sidecar.last_normalize_);
  EXPECT_EQ(remote, embed_texts(MockProvider(256, false), 64, kTexts));
}

TEST(RemoteProvider, RetriesUnavailable) {
  FakeSidecar sidecar;
  sidecar.failures_left_ = 2;
  const auto remote = embed_texts(sidecar.config(), std::vector<std::string>{"abc"});
  EXPECT_EQ(remote.count(), 1u);
  EXPECT_EQ(sidecar.requests_, 3);
}

TEST(RemoteProvider, GivesUpAfterRetriesWithRetryableError) {
  FakeSidecar sidecar;
  sidecar.failures_left_ = 100;
  try {
    embed_texts(sidecar.config(), std::vector<std::string>{"abc"});
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_TRUE(e.retryable());
    EXPECT_EQ(e.kind(), ErrorKind::Provider);
  }
  EXPECT_EQ(sidecar.requests_, 3);
}

TEST(RemoteProvider, UnreachableIsRetryableTransportError) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  ProviderConfig cfg;
  cfg.kind = ProviderKind::Remote;
  cfg.location = "http://127.0.0.1:" + std::to_string(port);
  cfg.max_retries = 1;
  cfg.timeout_ms = 500;
  try {
    embed_texts(cfg, std::vector<std::string>{"abc"});
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_TRUE(e.retryable());
    EXPECT_NE(std::string(e.what()).find("unreachable"), std::string::npos);
  }
}

TEST(RemoteProvider, WrongRowCountIsProviderError) {
  FakeSidecar sidecar;
  sidecar.short_reply_ = true;
  try {
    embed_texts(sidecar.config(), std::vector<std::string>{"a", "b"});
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_FALSE(e.retryable());
  }
}

TEST(RemoteProvider, RejectsNonHttpLocation) {
  ProviderConfig cfg;
  cfg.kind = ProviderKind::Remote;
  cfg.location = "ftp://x";
  EXPECT_THROW(make_provider(cfg), ConfigError);
}

}  // namespace
}  // namespace parmine
