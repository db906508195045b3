#pragma once

#include <filesystem>
#include <string>

#include "wakesteer/scenario_io.hpp"

namespace wakesteer::test {

inline std::filesystem::path data_dir() { return WAKESTEER_DATA_DIR; }
inline std::filesystem::path cli_path() { return WAKESTEER_CLI; }

inline ScenarioFile scenario(const std::string& name) { return load_scenario(data_dir() / name); }

/// Fresh empty directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::path(WAKESTEER_SCRATCH_DIR) / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace wakesteer::test
