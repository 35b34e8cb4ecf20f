// readapt-service: serves the adaptivity engine over HTTP.
//
// Usage: readapt-service [config.json]
// Environment: READAPT_PORT and READAPT_DATA_DIR override the config file.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>

#include <readapt/readapt.hpp>

namespace {

struct ServiceConfig {
    int port = 8080;
    std::string host = "0.0.0.0";
    std::string data_dir = "./data";
    bool fsync_on_append = false;
    readapt::AdaptationConfig adaptation;
};

ServiceConfig load_config(const char* path) {
    using namespace readapt;
    ServiceConfig cfg;
    if (path) {
        std::ifstream in(path);
        if (!in)
            fail(ErrorCode::io_error, std::string("cannot read config file ") + path);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        jsonx::json doc = jsonx::parse_bytes(bytes, path);
        jsonx::as_object(doc, "service config");
        jsonx::check_keys(doc, {"port", "host", "data_dir", "fsync_on_append", "adaptation"},
                          "service config");
        cfg.port = static_cast<int>(jsonx::opt_int(doc, "port", cfg.port, "service config"));
        cfg.host = jsonx::opt_string(doc, "host", cfg.host, "service config");
        cfg.data_dir = jsonx::opt_string(doc, "data_dir", cfg.data_dir, "service config");
        cfg.fsync_on_append =
            jsonx::opt_bool(doc, "fsync_on_append", cfg.fsync_on_append, "service config");
        if (const jsonx::json* a = jsonx::find(doc, "adaptation"))
            cfg.adaptation = adaptation_config_from_json(*a);
    }
    if (const char* port = std::getenv("READAPT_PORT"))
        cfg.port = std::atoi(port);
    if (const char* dir = std::getenv("READAPT_DATA_DIR"))
        cfg.data_dir = dir;
    if (cfg.port < 1 || cfg.port > 65535)
        fail(ErrorCode::invalid_config, "port must lie in [1, 65535]");
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 2) {
        std::fprintf(stderr, "usage: %s [config.json]\n", argv[0]);
        return 1;
    }
    try {
        ServiceConfig cfg = load_config(argc == 2 ? argv[1] : nullptr);
        readapt::EngineOptions options;
        options.data_dir = cfg.data_dir;
        options.config = cfg.adaptation;
        options.fsync_on_append = cfg.fsync_on_append;
        readapt::Engine engine(std::move(options));
        readapt::Service service(engine);
        std::printf("readapt-service listening on %s:%d, data in %s\n", cfg.host.c_str(),
                    cfg.port, cfg.data_dir.c_str());
        std::fflush(stdout);
        if (!service.server().listen(cfg.host, cfg.port)) {
            std::fprintf(stderr, "cannot bind %s:%d\n", cfg.host.c_str(), cfg.port);
            return 1;
        }
        return 0;
    } catch (const readapt::DomainError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return e.code() == readapt::ErrorCode::io_error ? 1 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
}
