#include "modkin/service/http_server.hpp"

#include <functional>
#include <iostream>

#include <httplib.h>

#include "modkin/service/codec.hpp"

namespace modkin::service {

namespace {

const Codec kCodec{AngleUnit::degrees};

struct Reply {
  int status = 200;
  json body;
};

using Route = std::function<Reply(const httplib::Request&)>;

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

httplib::Server::Handler guarded(Route route) {
  return [route = std::move(route)](const httplib::Request& req, httplib::Response& res) {
    try {
      const Reply r = route(req);
      send(res, r.status, r.body);
    } catch (const NotFound& e) {
      send(res, 404, error_json(e.code(), e.what()));
    } catch (const Error& e) {
      send(res, is_kinematic(e.code()) ? 422 : 400, error_json(e));
    } catch (const json::exception& e) {
      send(res, 400, error_json("parse_error", e.what()));
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) throw Error(ErrorCode::parse_error, "request body is empty");
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed JSON: ") + e.what());
  }
}

json robot_summary(const RobotDefinition& def) {
  return {{"name", def.name},
          {"kind", std::string(to_string(def.kind))},
          {"actuator_count", actuator_count(def.kind)}};
}

json definition_json(const RobotDefinition& def) { return json::parse(save_definition(def)); }

}  // namespace

json session_json(const SessionState& state) {
  json out = kCodec.fk_result(*state.robot, state.last);
  out["id"] = state.id;
  out["revision"] = state.revision;
  return out;
}

void mount_routes(httplib::Server& server, Service& service) {
  server.Get("/api/robots", guarded([&service](const httplib::Request&) {
    json list = json::array();
    for (const RobotPtr& def : service.robots()) list.push_back(robot_summary(*def));
    return Reply{200, {{"robots", list}}};
  }));

  server.Get(R"(/api/robots/([^/]+))", guarded([&service](const httplib::Request& req) {
    return Reply{200, definition_json(*service.robot(req.matches[1]))};
  }));

  server.Put(R"(/api/robots/([^/]+))", guarded([&service](const httplib::Request& req) {
    const std::string name = req.matches[1];
    json body = parse_body(req);
    if (!body.is_object()) throw Error(ErrorCode::parse_error, "definition must be a JSON object");
    if (!body.contains("name")) body["name"] = name;
    if (body.at("name") != name) {
      throw Error(ErrorCode::validation_error, "name in body does not match the URL", "name");
    }
    RobotDefinition def = load_definition(body.dump());
    const bool fresh = service.put_robot(def);
    return Reply{fresh ? 201 : 200, definition_json(def)};
  }));

  server.Post(R"(/api/robots/([^/]+)/fk)", guarded([&service](const httplib::Request& req) {
    const RobotPtr def = service.robot(req.matches[1]);
    const FkResult r = forward(*def, kCodec.fk_request(parse_body(req)));
    return Reply{200, kCodec.fk_result(*def, r)};
  }));

  server.Post(R"(/api/robots/([^/]+)/ik)", guarded([&service](const httplib::Request& req) {
    const RobotPtr def = service.robot(req.matches[1]);
    const IkResult r = inverse(*def, kCodec.ik_request(parse_body(req)));
    return Reply{200, kCodec.ik_result(*def, r)};
  }));

  server.Get(R"(/api/robots/([^/]+)/dof)", guarded([&service](const httplib::Request& req) {
    const RobotPtr def = service.robot(req.matches[1]);
    json out = kCodec.dof(robot_dof(*def));
    out["robot"] = def->name;
    out["kind"] = std::string(to_string(def->kind));
    return Reply{200, out};
  }));

  server.Post("/api/sessions", guarded([&service](const httplib::Request& req) {
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("robot") || !body.at("robot").is_string()) {
      throw Error(ErrorCode::validation_error, "missing robot name", "robot");
    }
    for (const auto& [key, _] : body.items()) {
      if (key != "robot" && key != "actuators_deg") {
        throw Error(ErrorCode::validation_error, "unknown field '" + key + "'", key);
      }
    }
    std::optional<std::vector<double>> start;
    if (body.contains("actuators_deg")) start = kCodec.actuators(body.at("actuators_deg"), "actuators_deg");
    return Reply{201, session_json(service.create_session(body.at("robot").get<std::string>(), start))};
  }));

  server.Patch(R"(/api/sessions/([^/]+)/actuators)", guarded([&service](const httplib::Request& req) {
    const std::string id = req.matches[1];
    const json body = parse_body(req);
    if (!body.is_object()) throw Error(ErrorCode::parse_error, "request body must be a JSON object");
    if (body.contains("actuators_deg") == body.contains("jog") || body.size() != 1) {
      throw Error(ErrorCode::validation_error, "send exactly one of actuators_deg or jog");
    }
    if (body.contains("jog")) {
      const json& jog = body.at("jog");
      if (!jog.is_object() || !jog.contains("index") || !jog.at("index").is_number_unsigned()) {
        throw Error(ErrorCode::validation_error, "jog.index must be a non-negative integer",
                    "jog.index");
      }
      if (!jog.contains("delta_deg")) {
        throw Error(ErrorCode::validation_error, "missing jog.delta_deg", "jog.delta_deg");
      }
      const double delta = kCodec.angle_in(number_at(jog.at("delta_deg"), "jog.delta_deg"));
      return Reply{200, session_json(service.jog(id, jog.at("index").get<std::size_t>(), delta))};
    }
    const auto target = kCodec.actuators(body.at("actuators_deg"), "actuators_deg");
    return Reply{200, session_json(service.set_actuators(id, target))};
  }));

  server.Get(R"(/api/sessions/([^/]+)/state)", guarded([&service](const httplib::Request& req) {
    return Reply{200, session_json(service.session(req.matches[1]))};
  }));
}

int serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  mount_routes(server, service);
  std::cerr << "modkin service listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace modkin::service
