// Copyright 2026 The ReviewLens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <httplib.h>

#include <charconv>
#include <json.hpp>
#include <thread>

#include "reviewlens/errors.h"
#include "reviewlens/json_io.h"
#include "reviewlens/service.h"

namespace reviewlens {

using nlohmann::json;

namespace {

constexpr size_t kDefaultPageSize = 20;

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, json{{"error", message}}, status);
}

std::optional<int64_t> int_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  const std::string v = req.get_param_value(name);
  int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw BadRequest(std::string("parameter ") + name + " is not an integer");
  }
  return out;
}

json status_json(const JobStatusView& s) {
  auto progress = [](const ProductProgress& p) {
    return json{{"product_id", p.product_id}, {"processed", p.processed}, {"total", p.total}};
  };
  json history = json::array();
  for (auto p : s.history) history.push_back(phase_name(p));
  json out{{"job_id", s.job_id},
           {"phase", phase_name(s.phase)},
           {"history", history},
           {"reference", progress(s.reference)},
           {"other", progress(s.other)},
           {"version", s.version}};
  if (!s.error.empty()) out["error"] = s.error;
  return out;
}

std::string sse_event(const ComparisonSummary& summary) {
  return "id: " + std::to_string(summary.version) + "\nevent: summary\ndata: " +
         json(summary).dump() + "\n\n";
}

// Maps library errors onto HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const BadRequest& e) {
    send_error(res, 400, e.what());
  } catch (const NotFoundError& e) {
    send_error(res, 404, e.what());
  } catch (const NotReadyError& e) {
    send_error(res, 409, e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(Dispatcher& d) : dispatcher(d) {}

  Dispatcher& dispatcher;
  httplib::Server server;
  std::thread thread;

  void routes();
};

void HttpServer::Impl::routes() {
  server.Get("/products", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string q = req.has_param("q") ? req.get_param_value("q") : "";
      send_json(res, json(dispatcher.store().search(q, 50)));
    });
  });

  server.Post("/compare", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = json::parse(req.body);
      CompareRequest request;
      request.reference = body.at("reference").get<std::string>();
      request.other = body.at("other").get<std::string>();
      if (body.contains("k") && !body["k"].is_null()) request.k = body["k"].get<int32_t>();
      if (body.contains("seed") && !body["seed"].is_null()) {
        request.seed = body["seed"].get<uint64_t>();
      }
      const std::string job_id = dispatcher.submit(request);
      send_json(res, json{{"job_id", job_id}});
    });
  });

  server.Get(R"(/compare/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, status_json(dispatcher.job(req.matches[1])->status())); });
  });

  server.Get(R"(/compare/([^/]+)/stream)",
             [this](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 auto job = dispatcher.job(req.matches[1]);
                 uint64_t last = 0;
                 if (req.has_header("Last-Event-ID")) {
                   const std::string v = req.get_header_value("Last-Event-ID");
                   std::from_chars(v.data(), v.data() + v.size(), last);
                 }
                 res.set_header("Cache-Control", "no-cache");
                 res.set_chunked_content_provider(
                     "text/event-stream",
                     [job, last](size_t, httplib::DataSink& sink) mutable {
                       if (!sink.is_writable()) return false;
                       auto summary = job->wait_newer(last, std::chrono::milliseconds(250));
                       if (summary) {
                         const std::string event = sse_event(*summary);
                         if (!sink.write(event.data(), event.size())) return false;
                         last = summary->version;
                         if (summary->done) sink.done();
                         return true;
                       }
                       const auto status = job->status();
                       if (status.phase == JobPhase::kFailed) {
                         const std::string event =
                             "event: error\ndata: " + json{{"error", status.error}}.dump() + "\n\n";
                         sink.write(event.data(), event.size());
                         sink.done();
                       } else if (status.phase == JobPhase::kDone) {
                         // Resumed past the final event.
                         sink.done();
                       }
                       return true;
                     });
               });
             });

  server.Get(R"(/reviews/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      ReviewId id;
      try {
        id = ReviewId::from_hex(req.matches[1].str());
      } catch (const ParseError&) {
        throw NotFoundError("unknown review " + req.matches[1].str());
      }
      send_json(res, json(dispatcher.store().fetch_review(id)));
    });
  });

  server.Get(R"(/products/([^/]+)/reviews)",
             [this](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const std::string product_id = req.matches[1];
                 if (!req.has_param("job")) throw BadRequest("missing job parameter");
                 const auto topic = int_param(req, "topic");
                 if (!topic) throw BadRequest("missing topic parameter");
                 const size_t offset = static_cast<size_t>(std::max<int64_t>(
                     0, int_param(req, "offset").value_or(0)));
                 const size_t limit = static_cast<size_t>(std::max<int64_t>(
                     0, int_param(req, "limit").value_or(kDefaultPageSize)));

                 auto job = dispatcher.job(req.get_param_value("job"));
                 const ProductSummary* side = nullptr;
                 auto summary = job->latest();
                 const auto& request = job->request();
                 if (product_id != request.reference && product_id != request.other) {
                   throw NotFoundError("product " + product_id + " is not part of this job");
                 }
                 if (!summary) throw NotReadyError("no summary emitted yet");
                 side = product_id == request.reference ? &summary->reference : &summary->other;
                 if (*topic < 0 || *topic >= side->num_topics) {
                   throw BadRequest("topic out of range");
                 }
                 const auto order = reviews_by_topic(side->reviews, static_cast<int32_t>(*topic));
                 json page = json::array();
                 for (size_t i = offset; i < order.size() && i < offset + limit; ++i) {
                   page.push_back(side->reviews[order[i]]);
                 }
                 send_json(res, page);
               });
             });

  if (!dispatcher.config().static_dir.empty()) {
    server.set_mount_point("/", dispatcher.config().static_dir);
  }
}

HttpServer::HttpServer(Dispatcher& dispatcher) : impl_(std::make_unique<Impl>(dispatcher)) {
  impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace reviewlens
