// sga/http_server.cpp

#include <httplib.h>

#include "sga/service.hpp"

namespace sga {

struct HttpServer::Impl {
  AssessmentService &service;
  httplib::Server server;

  explicit Impl(AssessmentService &s) : service(s) {}
};

namespace {

void send(httplib::Response &res, const ApiResponse &r) {
  res.status = r.status;
  if (!r.text.empty() || r.body.is_null())
    res.set_content(r.text, r.content_type);
  else
    res.set_content(r.body.dump(), "application/json");
}

bool parse_body(const httplib::Request &req, httplib::Response &res, nlohmann::json &out) {
  out = nlohmann::json::parse(req.body.empty() ? "{}" : req.body, nullptr, false);
  if (out.is_discarded()) {
    send(res, {400, {{"error", "request body is not valid JSON"}}});
    return false;
  }
  return true;
}

}  // namespace

HttpServer::HttpServer(AssessmentService &service) : impl_(std::make_unique<Impl>(service)) {
  auto &srv = impl_->server;
  auto &svc = impl_->service;

  // The browser client may be served from another origin.
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(R"(.*)", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });

  srv.Get("/health", [](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  srv.Post("/assessments", [&svc](const httplib::Request &req, httplib::Response &res) {
    nlohmann::json body;
    if (parse_body(req, res, body)) send(res, svc.create(body));
  });
  srv.Get(R"(/assessments/([^/]+)/display)",
          [&svc](const httplib::Request &req, httplib::Response &res) {
            send(res, svc.display(req.matches[1]));
          });
  srv.Post(R"(/assessments/([^/]+)/submission)",
           [&svc](const httplib::Request &req, httplib::Response &res) {
             nlohmann::json body;
             if (parse_body(req, res, body)) send(res, svc.submit(req.matches[1], body));
           });
  srv.Get(R"(/assessments/([^/]+)/report)",
          [&svc](const httplib::Request &req, httplib::Response &res) {
            send(res, svc.report(req.matches[1]));
          });
  srv.Get("/cohort/report", [&svc](const httplib::Request &req, httplib::Response &res) {
    std::string format = req.has_param("format") ? req.get_param_value("format") : "json";
    std::string cohort = req.has_param("cohort") ? req.get_param_value("cohort") : "";
    send(res, svc.cohort(format, cohort));
  });
  srv.set_exception_handler([](const httplib::Request &, httplib::Response &res,
                               std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception &e) {
      what = e.what();
    } catch (...) {
    }
    send(res, {500, {{"error", what}}});
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string &host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace sga
