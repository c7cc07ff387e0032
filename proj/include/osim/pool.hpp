#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osim/config.hpp"
#include "osim/protocol.hpp"

namespace osim {

inline constexpr std::string_view kArtifactVersion = "1.0.0";

nlohmann::json record_to_json(const TrialRecord& record);
TrialRecord record_from_json(const nlohmann::json& j);

/// One NDJSON line (without the newline). Keys are sorted, so parsing and
/// re-serializing a line reproduces it byte for byte.
std::string record_line(const TrialRecord& record);
std::string failure_line(const TrialFailure& failure, std::string_view config_hash);
std::string header_line(const ExperimentConfig& config);

/// Parsed contents of a pool file.
struct PoolFile {
  nlohmann::json header;
  ExperimentPool pool;                 ///< latest successful record per trial, sorted
  std::vector<TrialFailure> failures;  ///< failed trials without a later success
  std::size_t incomplete_bytes = 0;    ///< size of an unterminated trailing line
};

/// Reads a pool. An unterminated trailing line (interrupted write) is
/// ignored; any other malformed line is a DataError naming the line.
PoolFile read_pool(const std::filesystem::path& path);

/// Config stored in the pool header.
ExperimentConfig pool_config(const PoolFile& file);

/// Single appender for a pool file. Opening an existing pool checks its
/// config hash and drops an unterminated trailing line; a new pool starts
/// with a header line. Every append is one write of a full line, flushed.
class PoolWriter {
 public:
  PoolWriter(const std::filesystem::path& path, const ExperimentConfig& config);
  ~PoolWriter();
  PoolWriter(const PoolWriter&) = delete;
  PoolWriter& operator=(const PoolWriter&) = delete;

  /// Trial indices that already have a successful record.
  const std::vector<std::size_t>& completed() const noexcept { return completed_; }

  void append(const TrialRecord& record);
  void append(const TrialFailure& failure);

 private:
  void write_line(const std::string& line);

  std::FILE* file_ = nullptr;
  std::string hash_;
  std::vector<std::size_t> completed_;
};

}  // namespace osim
