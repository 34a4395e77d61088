#pragma once

#include "tscope/config.hpp"

#include <json.hpp>

#include <string>

namespace tscope {

// Each command writes its artifacts into out_dir and returns the JSON report it wrote.
nlohmann::json cmd_classify(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json cmd_tune(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json cmd_laurent(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json cmd_evolve(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json cmd_theorem_check(const RunConfig& cfg, const std::string& out_dir);
// Runs the acceptance suite; report["all_pass"] tells the outcome.
nlohmann::json cmd_selftest(const RunConfig& cfg, const std::string& out_dir, bool echo);

}  // namespace tscope
