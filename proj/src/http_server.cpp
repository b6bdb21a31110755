// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include <httplib.h>

#include "promptpower/error.hpp"
#include "promptpower/service.hpp"

namespace promptpower {

void run_http_server(EstimationService& service,
                     const std::function<void(const ServerHandle&)>& on_ready) {
  httplib::Server server;
  auto route = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse out = service.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  server.Get(R"(/v1/.*)", route);
  server.Post(R"(/v1/.*)", route);

  const ServiceConfig& cfg = service.config();
  int port = cfg.port;
  const bool bound = port == 0
                         ? (port = server.bind_to_any_port(cfg.host)) > 0
                         : server.bind_to_port(cfg.host, port);
  if (!bound) {
    throw Error(ErrorCode::kIo, "cannot bind " + cfg.host + ":" +
                                    std::to_string(cfg.port));
  }
  if (on_ready) on_ready({port, [&server] { server.stop(); }});
  server.listen_after_bind();
}

}  // namespace promptpower
