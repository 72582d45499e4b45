#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rmot/evaluation.hpp"
#include "rmot/types.hpp"

namespace rmot::io {

namespace fs = std::filesystem;

// Box files: `frame,track_id,x,y,w,h` (predictions append
// `,confidence,referring_score`). An optional header is recognized by a
// non-numeric first field. LF and CRLF are accepted; writers emit LF.

/// Tracks sorted by id. Errors: FILE_NOT_FOUND, LINE_FIELD_COUNT, BAD_NUMBER,
/// DUPLICATE_FRAME_TRACK, all with file and line.
std::vector<GroundTruthTrack> parse_gt(const fs::path& path);
void write_gt(const fs::path& path, const std::vector<GroundTruthTrack>& tracks);

struct ExpressionParseResult {
    std::vector<ExpressionTask> tasks;
    /// Target intervals covering frames where the track is absent.
    std::vector<std::string> warnings;
};

/// JSON list of {expression_id, sequence_id, text, targets: [{track_id,
/// start_frame, end_frame}]}. Intervals are inclusive and resolved against
/// the sequences' gt tracks. Errors: UNKNOWN_SEQUENCE, UNKNOWN_TRACK,
/// BAD_INTERVAL, MALFORMED_DOCUMENT.
ExpressionParseResult parse_expressions(const fs::path& path, const std::vector<Sequence>& sequences);
/// Target frames are written back as maximal runs of consecutive frames per track.
void write_expressions(const fs::path& path, const std::vector<ExpressionTask>& tasks);

/// `frame,day,night,viewpoint_change,scale_variation,occlusion,fast_motion,
/// rotation,low_resolution` with 0/1 cells. Errors: NON_BINARY_CELL,
/// MISSING_FRAME_ROW (rows must cover 1..max(expected_length, last row)),
/// DUPLICATE_FRAME_ROW, LINE_FIELD_COUNT. Day+Night on one row parses; the
/// validator reports it.
AttributeFrameLabels parse_attributes(const fs::path& path, std::string sequence_id,
                                      std::optional<Frame> expected_length = std::nullopt);
void write_attributes(const fs::path& path, const AttributeFrameLabels& labels);

/// Errors: SCORE_RANGE, LINE_FIELD_COUNT, BAD_NUMBER. Empty file is valid.
std::vector<Detection> parse_predictions(const fs::path& path);
void write_predictions(const fs::path& path, const std::vector<Detection>& dets);

/// `<sequence_id>__<expression_id>.txt`
std::string prediction_file_name(const UnitKey& key);

struct PredictionLoad {
    PredictionSet predictions;
    std::vector<std::string> warnings;
    std::vector<fs::path> files;
};

/// Reads one prediction file per expression unit. A missing file means no
/// predictions (warning), or MISSING_PREDICTIONS in strict mode.
PredictionLoad load_predictions(const fs::path& dir, const Dataset& dataset, bool strict);
void save_predictions(const fs::path& dir, const PredictionSet& predictions);

/// Bundle layout:
///   manifest.json       {"sequences": [{"id", "length", "split"}]}
///   gt/<seq>.txt        box file per sequence
///   expressions.json    expression document
///   attributes/<seq>.txt (optional)
/// Without manifest.json, sequences are discovered from gt/*.txt and their
/// length is the last annotated frame. Errors: NO_SEQUENCES plus parser errors.
struct DatasetLoad {
    Dataset dataset;
    std::vector<std::string> warnings;
    std::vector<fs::path> files;
};

DatasetLoad load_dataset(const fs::path& dir, std::optional<fs::path> attribute_dir = std::nullopt);
void save_dataset(const fs::path& dir, const Dataset& dataset);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

}  // namespace rmot::io
