#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "teql/schema.hpp"

namespace teql {

struct PredictRequest {
  std::string id;
  std::string question;
  const Schema* schema = nullptr;
};

/// `ok` is false on transport errors, timeouts and protocol violations;
/// `raw` then holds whatever payload came back.
struct Prediction {
  bool ok = false;
  std::string sql;
  std::string error;
  std::string raw;
};

/// Wire payload for one request: {"id", "question", "db_id", "schema"}.
std::string encode_request(const PredictRequest& request);

/// A black-box text-to-SQL model. `predict` must be safe to call from
/// several threads at once.
class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  virtual Prediction predict(const PredictRequest& request) = 0;
  virtual std::string describe() const = 0;

  /// Responses that could not be attributed to any request, verbatim.
  std::vector<std::string> protocol_violations() const;

 protected:
  void record_violation(std::string raw);

 private:
  mutable std::mutex violations_mu_;
  std::vector<std::string> violations_;
};

struct AdapterSpec {
  enum class Transport { Subprocess, Http };
  Transport transport = Transport::Subprocess;
  std::string target;  // shell command or base URL
  std::chrono::milliseconds timeout{30000};
  int max_inflight = 4;

  std::string to_string() const;
};

/// Parses `cmd:<shell command>` or `http:<url>`.
AdapterSpec parse_adapter_spec(std::string_view text, double timeout_seconds = 30.0, int max_inflight = 4);
void validate_adapter_spec(const AdapterSpec& spec);
std::unique_ptr<ModelAdapter> make_adapter(const AdapterSpec& spec);

/// Speaks the JSON-lines protocol to one long-lived child process. Requests
/// are pipelined; responses are matched by id in any order.
class SubprocessAdapter : public ModelAdapter {
 public:
  SubprocessAdapter(std::string command, std::chrono::milliseconds timeout);
  ~SubprocessAdapter() override;

  Prediction predict(const PredictRequest& request) override;
  std::string describe() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// POSTs the request body to `<url>/predict`.
class HttpAdapter : public ModelAdapter {
 public:
  HttpAdapter(std::string url, std::chrono::milliseconds timeout);

  Prediction predict(const PredictRequest& request) override;
  std::string describe() const override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

/// In-process model. A thrown exception becomes a failed prediction.
class FunctionAdapter : public ModelAdapter {
 public:
  using Fn = std::function<std::string(const std::string& question, const Schema& schema)>;

  explicit FunctionAdapter(Fn fn, std::string name = "function") : fn_(std::move(fn)), name_(std::move(name)) {}

  Prediction predict(const PredictRequest& request) override;
  std::string describe() const override { return name_; }

 private:
  Fn fn_;
  std::string name_;
};

}  // namespace teql
