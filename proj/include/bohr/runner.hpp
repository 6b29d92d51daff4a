#pragma once

// Experiment runner behind the bohr_lab command line.

#include <string>
#include <utility>
#include <vector>

#include "bohr/report.hpp"

namespace bohr {

enum class ParamKind { integer, real, text, reals, integers, real_rows, integer_rows };

struct ParamInfo {
  std::string key;
  ParamKind kind;
  std::string help;
};

const std::vector<std::string>& commands();

/// Parameters accepted by a command; throws std::invalid_argument for an unknown command.
const std::vector<ParamInfo>& command_params(const std::string& command);

/// Converts command-line text to JSON: lists are comma separated, rows
/// are separated by ';'.
Json parse_param(ParamKind kind, const std::string& text);

struct RunSpec {
  std::string command;
  Json params = Json::object();
  std::string format = "json";  // json | csv
  int workers = 1;
  bool timings = false;
};

struct RunResult {
  int exit_code = 0;     // 0 success, 2 inconclusive / unverified / control
  std::string verdict;
  std::string message;
  Json report;           // complete JSON report
  std::string csv;       // CSV rendering of the payload
};

inline constexpr int kSchemaVersion = 1;

/// Validates the spec, runs the experiment and assembles the report.
/// Invalid specs throw std::invalid_argument with a message naming the
/// offending parameter.
RunResult run(const RunSpec& spec);

/// Report bytes in the requested format.
std::string render(const RunResult& result, const std::string& format);

/// Worker count from BOHR_LAB_WORKERS, or 1 when unset.
int workers_from_env();

}  // namespace bohr
