#pragma once

#include "jrank/error.hpp"
#include "jrank/model/model.hpp"

#include <cstdint>
#include <string>

namespace jrank::train {

class CheckpointError : public FormatError {
public:
    using FormatError::FormatError;
};
class CheckpointVersionError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};
class CheckpointTruncatedError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};
class CheckpointChecksumError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

struct CheckpointMeta {
    std::uint64_t seed = 0;
    std::size_t epoch = 0;
    double dev_metric = 0.0;
    std::string dev_metric_name;
    friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

inline constexpr int kCheckpointVersion = 1;

/// Layout: the line "JRANK-CHECKPOINT", a line with the header length in
/// bytes, a JSON header (format version, model config, normalization
/// statistics, metadata, parameter names, shapes and byte offsets, FNV-1a
/// checksum of the payload), then the payload of little-endian float32 values.
void save_checkpoint(const std::string& path, const model::Model& model, const CheckpointMeta& meta);

struct LoadedCheckpoint {
    model::Model model;
    CheckpointMeta meta;
};

/// Throws CheckpointVersionError, CheckpointTruncatedError,
/// CheckpointChecksumError, or ShapeError when the stored parameters do not
/// fit the stored configuration.
LoadedCheckpoint load_checkpoint(const std::string& path);

/// Rounds every parameter to the nearest float32, the precision a checkpoint keeps.
void round_to_float32(ad::ParameterSet& params);

} // namespace jrank::train
