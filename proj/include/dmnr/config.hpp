// Flat key=value configuration. Defaults match the parameter table used for
// all reported experiments; command-line flags are expected to override
// whatever the file sets.

#ifndef DMNR_CONFIG_HPP
#define DMNR_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "dmnr/errors.hpp"
#include "dmnr/hdbscan.hpp"
#include "dmnr/types.hpp"

namespace dmnr {

struct Config {
    DmnrParams dmnr;
    HdbscanParams hdbscan;
    std::set<std::uint32_t> noise_ids;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value '" + value + "' for key '" +
                          key + "'");
    }
}

inline long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value '" + value + "' for key '" +
                          key + "'");
    }
}

inline std::set<std::uint32_t> parse_id_set(const std::string& key,
                                            const std::string& value) {
    std::set<std::uint32_t> ids;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const long v = parse_long(key, item);
        if (v < 0) {
            throw ConfigError("config: negative class id in '" + key + "'");
        }
        ids.insert(static_cast<std::uint32_t>(v));
    }
    return ids;
}

}  // namespace detail

inline void apply_config_entry(Config& cfg, const std::string& key,
                               const std::string& value) {
    if (key == "K") {
        cfg.dmnr.k_neighbors = static_cast<int>(detail::parse_long(key, value));
    } else if (key == "k1") {
        cfg.dmnr.k1 = detail::parse_double(key, value);
    } else if (key == "k2") {
        cfg.dmnr.k2 = detail::parse_double(key, value);
    } else if (key == "k3") {
        cfg.dmnr.k3 = detail::parse_double(key, value);
    } else if (key == "h") {
        cfg.dmnr.rescue_clusters = static_cast<int>(detail::parse_long(key, value));
    } else if (key == "height_mode") {
        if (value == "adaptive") {
            cfg.dmnr.height_mode = HeightMode::Adaptive;
        } else if (value == "fixed") {
            cfg.dmnr.height_mode = HeightMode::Fixed;
        } else {
            throw ConfigError("config: height_mode must be 'adaptive' or 'fixed', got '" +
                              value + "'");
        }
    } else if (key == "h1") {
        cfg.dmnr.fixed_h1 = detail::parse_double(key, value);
    } else if (key == "h2") {
        cfg.dmnr.fixed_h2 = detail::parse_double(key, value);
    } else if (key == "min_cluster_size") {
        cfg.hdbscan.min_cluster_size =
            static_cast<int>(detail::parse_long(key, value));
    } else if (key == "min_samples") {
        cfg.hdbscan.min_samples = static_cast<int>(detail::parse_long(key, value));
    } else if (key == "noise_ids") {
        cfg.noise_ids = detail::parse_id_set(key, value);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

// `key = value` lines; '#' starts a comment; blank lines ignored.
inline Config parse_config(std::istream& in) {
    Config cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not 'key = value'");
        }
        apply_config_entry(cfg, detail::trim(line.substr(0, eq)),
                           detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path + "'");
    }
    return parse_config(in);
}

}  // namespace dmnr

#endif  // DMNR_CONFIG_HPP
