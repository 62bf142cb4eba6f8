#pragma once

#include "dataprog/project.hpp"

namespace httplib {
class Server;
}

namespace dataprog {

inline constexpr const char* kApiPrefix = "/api/v1";

// Registers the JSON API under kApiPrefix. Every response carries the
// project version in the X-Project-Version header, and JSON bodies carry it
// as "version". Error mapping: 400 bad input, 403 policy, 404 unknown
// document, 409 stale version, 422 LF diagnostics, 500 internal.
void register_api(httplib::Server& server, Project& project);

}  // namespace dataprog
