#include "teql/adapter.hpp"

#include <condition_variable>
#include <map>
#include <optional>

#include "httplib.h"
#include "json.hpp"
#include "teql/subprocess.hpp"
#include "teql/util.hpp"

namespace teql {

using nlohmann::json;
using nlohmann::ordered_json;

std::string encode_request(const PredictRequest& request) {
  ordered_json j;
  j["id"] = request.id;
  j["question"] = request.question;
  j["db_id"] = request.schema ? request.schema->db_id : std::string();
  j["schema"] = request.schema ? schema_to_json(*request.schema) : ordered_json::object();
  return j.dump();
}

namespace {

struct Response {
  std::string id;
  std::optional<std::string> sql;
};

std::optional<Response> decode_response(const std::string& payload) {
  json j = json::parse(payload, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) return std::nullopt;
  Response r{id->get<std::string>(), std::nullopt};
  auto sql = j.find("sql");
  if (sql != j.end() && sql->is_string()) r.sql = sql->get<std::string>();
  return r;
}

Prediction failure(std::string error, std::string raw = {}) {
  Prediction p;
  p.error = std::move(error);
  p.raw = std::move(raw);
  return p;
}

}  // namespace

std::vector<std::string> ModelAdapter::protocol_violations() const {
  std::lock_guard lock(violations_mu_);
  return violations_;
}

void ModelAdapter::record_violation(std::string raw) {
  std::lock_guard lock(violations_mu_);
  violations_.push_back(std::move(raw));
}

std::string AdapterSpec::to_string() const {
  return (transport == Transport::Subprocess ? "cmd:" : "http:") + target;
}

AdapterSpec parse_adapter_spec(std::string_view text, double timeout_seconds, int max_inflight) {
  AdapterSpec spec;
  if (text.starts_with("cmd:")) {
    spec.transport = AdapterSpec::Transport::Subprocess;
    spec.target = std::string(text.substr(4));
  } else if (text.starts_with("http:") || text.starts_with("https:")) {
    spec.transport = AdapterSpec::Transport::Http;
    const std::string rest(text.substr(text.find(':') + 1));
    if (rest.find("://") != std::string::npos) {
      spec.target = rest;
    } else if (text.find("://") != std::string::npos) {
      spec.target = std::string(text);
    } else {
      spec.target = "http://" + rest;
    }
  } else {
    throw DataError("adapter must be cmd:<command> or http:<url>, got '" + std::string(text) + "'");
  }
  spec.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_seconds * 1000.0));
  spec.max_inflight = max_inflight;
  validate_adapter_spec(spec);
  return spec;
}

void validate_adapter_spec(const AdapterSpec& spec) {
  if (trim(spec.target).empty()) throw DataError("adapter target is empty");
  if (spec.timeout.count() <= 0) throw DataError("adapter timeout must be positive");
  if (spec.max_inflight < 1) throw DataError("max_inflight must be >= 1");
}

std::unique_ptr<ModelAdapter> make_adapter(const AdapterSpec& spec) {
  validate_adapter_spec(spec);
  if (spec.transport == AdapterSpec::Transport::Subprocess) {
    return std::make_unique<SubprocessAdapter>(spec.target, spec.timeout);
  }
  return std::make_unique<HttpAdapter>(spec.target, spec.timeout);
}

// ---- subprocess ----

struct SubprocessAdapter::Impl {
  struct Pending {
    bool done = false;
    Prediction result;
  };

  std::string command;
  std::chrono::milliseconds timeout;
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, std::shared_ptr<Pending>> pending;
  bool closed = false;
  std::unique_ptr<Subprocess> child;
};

SubprocessAdapter::SubprocessAdapter(std::string command, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>()) {
  impl_->command = std::move(command);
  impl_->timeout = timeout;
  Impl* impl = impl_.get();
  auto on_line = [this, impl](std::string line) {
    if (trim(line).empty()) return;
    auto response = decode_response(line);
    std::shared_ptr<Impl::Pending> slot;
    if (response) {
      std::lock_guard lock(impl->mu);
      auto it = impl->pending.find(response->id);
      if (it != impl->pending.end()) {
        slot = it->second;
        impl->pending.erase(it);
      }
    }
    if (!slot) {
      record_violation(line);
      return;
    }
    {
      std::lock_guard lock(impl->mu);
      slot->done = true;
      if (response->sql) {
        slot->result.ok = true;
        slot->result.sql = *response->sql;
      } else {
        slot->result = failure("response has no string 'sql' field", line);
      }
    }
    impl->cv.notify_all();
  };
  auto on_eof = [impl] {
    std::lock_guard lock(impl->mu);
    impl->closed = true;
    for (auto& [id, slot] : impl->pending) {
      slot->done = true;
      slot->result = failure("model process closed its output");
    }
    impl->pending.clear();
    impl->cv.notify_all();
  };
  impl_->child = std::make_unique<Subprocess>(impl_->command, on_line, on_eof);
}

SubprocessAdapter::~SubprocessAdapter() { impl_->child.reset(); }

Prediction SubprocessAdapter::predict(const PredictRequest& request) {
  auto slot = std::make_shared<Impl::Pending>();
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->closed) return failure("model process closed its output");
    if (impl_->pending.count(request.id)) return failure("duplicate request id '" + request.id + "'");
    impl_->pending[request.id] = slot;
  }
  if (!impl_->child->write_line(encode_request(request))) {
    std::lock_guard lock(impl_->mu);
    impl_->pending.erase(request.id);
    return failure("cannot write to model process");
  }
  std::unique_lock lock(impl_->mu);
  if (!impl_->cv.wait_for(lock, impl_->timeout, [&] { return slot->done; })) {
    impl_->pending.erase(request.id);
    return failure("timed out after " + std::to_string(impl_->timeout.count()) + " ms");
  }
  return slot->result;
}

std::string SubprocessAdapter::describe() const { return "cmd:" + impl_->command; }

// ---- http ----

HttpAdapter::HttpAdapter(std::string url, std::chrono::milliseconds timeout) : timeout_(timeout) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw DataError("http adapter url needs a scheme: '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? std::string() : url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/predict";
}

Prediction HttpAdapter::predict(const PredictRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto sec = timeout_.count() / 1000;
  const auto usec = (timeout_.count() % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  auto res = client.Post(path_, encode_request(request), "application/json");
  if (!res) return failure("http error: " + httplib::to_string(res.error()));
  if (res->status != 200) return failure("http status " + std::to_string(res->status), res->body);
  auto response = decode_response(res->body);
  if (!response || response->id != request.id) {
    record_violation(res->body);
    return failure("malformed or mismatched response", res->body);
  }
  if (!response->sql) return failure("response has no string 'sql' field", res->body);
  Prediction p;
  p.ok = true;
  p.sql = *response->sql;
  return p;
}

std::string HttpAdapter::describe() const { return "http:" + scheme_host_port_ + path_; }

// ---- in-process ----

Prediction FunctionAdapter::predict(const PredictRequest& request) {
  try {
    Prediction p;
    p.sql = fn_(request.question, *request.schema);
    p.ok = true;
    return p;
  } catch (const std::exception& e) {
    return failure(e.what());
  }
}

}  // namespace teql
