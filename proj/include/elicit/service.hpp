#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace elicit::service {

struct Config {
  std::filesystem::path data_dir = "./data";
  // Unset disables the facilitator check (single-user local runs).
  std::optional<std::string> facilitator_token;
};

/// Reads DATA_DIR and FACILITATOR_TOKEN; `data_dir` wins over DATA_DIR when given.
Config config_from_env(std::optional<std::filesystem::path> data_dir = std::nullopt);

/// Header carrying the facilitator token.
inline constexpr const char* kFacilitatorHeader = "X-Facilitator-Token";

/// Server with every route registered; the caller binds and listens.
std::unique_ptr<httplib::Server> make_server(const Config& config);

/// Blocks serving on host:port.
void serve(const Config& config, const std::string& host, int port);

}  // namespace elicit::service
