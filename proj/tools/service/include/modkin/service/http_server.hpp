#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "modkin/service/service.hpp"

namespace httplib {
class Server;
}

namespace modkin::service {

/// Registers the /api routes on `server`. `service` must outlive it.
void mount_routes(httplib::Server& server, Service& service);

/// JSON body of GET /api/sessions/{id}/state.
nlohmann::json session_json(const SessionState& state);

/// Blocks serving on host:port until the process is stopped.
int serve(Service& service, const std::string& host, int port);

}  // namespace modkin::service
