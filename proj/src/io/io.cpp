#include "rmot/io.hpp"

#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <set>
#include <sstream>

#include "rmot/error.hpp"

namespace rmot::io {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("FILE_NOT_FOUND", "cannot open for reading", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("OUTPUT_UNWRITABLE", "cannot open for writing", path.string());
    out << content;
    if (!out) throw Error("OUTPUT_UNWRITABLE", "write failed", path.string());
}

/// Comma-separated records with 1-based line numbers; blank lines skipped,
/// trailing CR stripped, a leading header (non-numeric first field) dropped.
class CsvReader {
public:
    CsvReader(const fs::path& path) : path_(path), text_(read_file(path)) {}

    bool next(std::vector<std::string_view>& fields) {
        while (pos_ < text_.size()) {
            const std::size_t end = std::min(text_.find('\n', pos_), text_.size());
            std::string_view line(text_.data() + pos_, end - pos_);
            pos_ = end + 1;
            ++line_;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

            fields.clear();
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = line.find(',', start);
                fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            const bool first = !seen_record_;
            seen_record_ = true;
            if (first && !is_number(fields[0])) continue;
            return true;
        }
        return false;
    }

    std::size_t line() const { return line_; }
    const fs::path& path() const { return path_; }

    [[noreturn]] void fail(const std::string& code, const std::string& message) const {
        throw Error(code, message, path_.string(), line_);
    }

    void expect_fields(const std::vector<std::string_view>& fields, std::size_t n) const {
        if (fields.size() != n) fail("LINE_FIELD_COUNT", fmt::format("expected {} fields, got {}", n, fields.size()));
    }

    double real(std::string_view s) const {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
            fail("BAD_NUMBER", fmt::format("'{}' is not a finite number", s));
        }
        return v;
    }

    std::int64_t integer(std::string_view s) const {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail("BAD_NUMBER", fmt::format("'{}' is not an integer", s));
        return v;
    }

    Frame frame(std::string_view s) const {
        const Frame f = integer(s);
        if (f < 1) fail("BAD_FRAME", fmt::format("frame {} is not >= 1", f));
        return f;
    }

private:
    static std::string_view trim(std::string_view s) {
        const auto b = s.find_first_not_of(" \t");
        if (b == std::string_view::npos) return {};
        const auto e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    }

    static bool is_number(std::string_view s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return ec == std::errc() && ptr == s.data() + s.size();
    }

    fs::path path_;
    std::string text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
    bool seen_record_ = false;
};

std::string box_fields(const BoundingBox& b) { return fmt::format("{},{},{},{}", b.x, b.y, b.w, b.h); }

std::string json_string(const json& j, const char* key, const fs::path& path) {
    if (!j.contains(key)) throw Error("MALFORMED_DOCUMENT", fmt::format("missing field '{}'", key), path.string());
    const json& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw Error("MALFORMED_DOCUMENT", fmt::format("field '{}' must be a string", key), path.string());
}

std::int64_t json_int(const json& j, const char* key, const fs::path& path) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
        throw Error("MALFORMED_DOCUMENT", fmt::format("field '{}' must be an integer", key), path.string());
    }
    return j.at(key).get<std::int64_t>();
}

}  // namespace

std::vector<GroundTruthTrack> parse_gt(const fs::path& path) {
    CsvReader reader(path);
    std::map<TrackId, GroundTruthTrack> tracks;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        reader.expect_fields(f, 6);
        const Frame frame = reader.frame(f[0]);
        const TrackId id{reader.integer(f[1])};
        const BoundingBox box{reader.real(f[2]), reader.real(f[3]), reader.real(f[4]), reader.real(f[5])};
        auto& track = tracks.try_emplace(id, GroundTruthTrack{id, {}}).first->second;
        if (!track.boxes.emplace(frame, box).second) {
            reader.fail("DUPLICATE_FRAME_TRACK", fmt::format("track {} has two boxes on frame {}", id.value, frame));
        }
    }
    std::vector<GroundTruthTrack> out;
    out.reserve(tracks.size());
    for (auto& [id, t] : tracks) out.push_back(std::move(t));
    return out;
}

void write_gt(const fs::path& path, const std::vector<GroundTruthTrack>& tracks) {
    std::vector<std::tuple<Frame, TrackId, BoundingBox>> rows;
    for (const GroundTruthTrack& t : tracks) {
        for (const auto& [frame, box] : t.boxes) rows.emplace_back(frame, t.track_id, box);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::string out = "frame,track_id,x,y,w,h\n";
    for (const auto& [frame, id, box] : rows) out += fmt::format("{},{},{}\n", frame, id.value, box_fields(box));
    write_file(path, out);
}

ExpressionParseResult parse_expressions(const fs::path& path, const std::vector<Sequence>& sequences) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error("MALFORMED_DOCUMENT", e.what(), path.string());
    }
    if (doc.is_object() && doc.contains("expressions")) doc = doc.at("expressions");
    if (!doc.is_array()) throw Error("MALFORMED_DOCUMENT", "expected a list of expressions", path.string());

    std::map<std::string, const Sequence*> by_id;
    for (const Sequence& s : sequences) by_id.emplace(s.id, &s);

    ExpressionParseResult out;
    for (const json& item : doc) {
        if (!item.is_object()) throw Error("MALFORMED_DOCUMENT", "expression entry must be an object", path.string());
        ExpressionTask task;
        task.expression_id = json_string(item, "expression_id", path);
        task.sequence_id = json_string(item, "sequence_id", path);
        task.text = item.contains("text") ? json_string(item, "text", path) : std::string{};
        const auto seq = by_id.find(task.sequence_id);
        if (seq == by_id.end()) {
            throw Error("UNKNOWN_SEQUENCE",
                        fmt::format("expression {} references sequence {}", task.expression_id, task.sequence_id),
                        path.string());
        }
        const json targets = item.value("targets", json::array());
        if (!targets.is_array()) throw Error("MALFORMED_DOCUMENT", "targets must be a list", path.string());
        for (const json& t : targets) {
            const TrackId id{json_int(t, "track_id", path)};
            const Frame start = json_int(t, "start_frame", path);
            const Frame end = json_int(t, "end_frame", path);
            if (start > end || start < 1) {
                throw Error("BAD_INTERVAL",
                            fmt::format("expression {} track {}: interval [{}, {}]", task.expression_id, id.value, start, end),
                            path.string());
            }
            const auto& tracks = seq->second->tracks;
            const auto track = std::find_if(tracks.begin(), tracks.end(), [&](const auto& g) { return g.track_id == id; });
            if (track == tracks.end()) {
                throw Error("UNKNOWN_TRACK",
                            fmt::format("expression {} references track {} absent from sequence {}", task.expression_id,
                                        id.value, task.sequence_id),
                            path.string());
            }
            std::int64_t joined = 0;
            for (auto it = track->boxes.lower_bound(start); it != track->boxes.end() && it->first <= end; ++it) {
                task.targets[it->first].emplace(id, it->second);
                ++joined;
            }
            if (joined < end - start + 1) {
                out.warnings.push_back(fmt::format("{}/{}: track {} present on {} of {} frames in [{}, {}]",
                                                   task.sequence_id, task.expression_id, id.value, joined,
                                                   end - start + 1, start, end));
            }
        }
        task.no_target = task.active_frames() == 0;
        out.tasks.push_back(std::move(task));
    }
    return out;
}

void write_expressions(const fs::path& path, const std::vector<ExpressionTask>& tasks) {
    ordered_json doc = ordered_json::array();
    for (const ExpressionTask& task : tasks) {
        std::map<TrackId, std::vector<Frame>> frames;
        for (const auto& [frame, targets] : task.targets) {
            for (const auto& [id, box] : targets) frames[id].push_back(frame);
        }
        ordered_json targets = ordered_json::array();
        for (const auto& [id, fs] : frames) {
            std::size_t i = 0;
            while (i < fs.size()) {
                std::size_t j = i;
                while (j + 1 < fs.size() && fs[j + 1] == fs[j] + 1) ++j;
                targets.push_back({{"track_id", id.value}, {"start_frame", fs[i]}, {"end_frame", fs[j]}});
                i = j + 1;
            }
        }
        doc.push_back({{"expression_id", task.expression_id},
                       {"sequence_id", task.sequence_id},
                       {"text", task.text},
                       {"targets", std::move(targets)}});
    }
    write_file(path, doc.dump(2) + "\n");
}

AttributeFrameLabels parse_attributes(const fs::path& path, std::string sequence_id, std::optional<Frame> expected_length) {
    CsvReader reader(path);
    std::map<Frame, AttributeSet> rows;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        reader.expect_fields(f, 1 + kAttributeCount);
        const Frame frame = reader.frame(f[0]);
        AttributeSet set;
        for (std::size_t k = 0; k < kAttributeCount; ++k) {
            const std::string_view cell = f[k + 1];
            if (cell != "0" && cell != "1") {
                reader.fail("NON_BINARY_CELL", fmt::format("{} cell '{}' is not 0 or 1", attribute_name(kAllAttributes[k]), cell));
            }
            set.set(kAllAttributes[k], cell == "1");
        }
        if (!rows.emplace(frame, set).second) reader.fail("DUPLICATE_FRAME_ROW", fmt::format("frame {} listed twice", frame));
    }
    Frame last = rows.empty() ? 0 : rows.rbegin()->first;
    if (expected_length) last = std::max(last, *expected_length);

    AttributeFrameLabels labels{std::move(sequence_id), {}};
    labels.frames.reserve(static_cast<std::size_t>(last));
    for (Frame fr = 1; fr <= last; ++fr) {
        const auto it = rows.find(fr);
        if (it == rows.end()) throw Error("MISSING_FRAME_ROW", fmt::format("no row for frame {}", fr), path.string());
        labels.frames.push_back(it->second);
    }
    return labels;
}

void write_attributes(const fs::path& path, const AttributeFrameLabels& labels) {
    std::string out = "frame";
    for (Attribute a : kAllAttributes) out += fmt::format(",{}", attribute_name(a));
    out += '\n';
    for (Frame fr = 1; fr <= labels.frame_count(); ++fr) {
        out += std::to_string(fr);
        for (Attribute a : kAllAttributes) out += labels.has(fr, a) ? ",1" : ",0";
        out += '\n';
    }
    write_file(path, out);
}

std::vector<Detection> parse_predictions(const fs::path& path) {
    CsvReader reader(path);
    std::vector<Detection> out;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        reader.expect_fields(f, 8);
        Detection d;
        d.frame = reader.frame(f[0]);
        d.track_id = TrackId{reader.integer(f[1])};
        d.box = {reader.real(f[2]), reader.real(f[3]), reader.real(f[4]), reader.real(f[5])};
        d.confidence = reader.real(f[6]);
        d.referring_score = reader.real(f[7]);
        for (double s : {d.confidence, d.referring_score}) {
            if (s < 0.0 || s > 1.0) reader.fail("SCORE_RANGE", fmt::format("score {} outside [0,1]", s));
        }
        out.push_back(d);
    }
    return out;
}

void write_predictions(const fs::path& path, const std::vector<Detection>& dets) {
    std::string out = "frame,track_id,x,y,w,h,confidence,referring_score\n";
    for (const Detection& d : dets) {
        out += fmt::format("{},{},{},{},{}\n", d.frame, d.track_id.value, box_fields(d.box), d.confidence, d.referring_score);
    }
    write_file(path, out);
}

std::string prediction_file_name(const UnitKey& key) { return key.first + "__" + key.second + ".txt"; }

PredictionLoad load_predictions(const fs::path& dir, const Dataset& dataset, bool strict) {
    if (!fs::is_directory(dir)) throw Error("FILE_NOT_FOUND", "prediction directory does not exist", dir.string());
    PredictionLoad out;
    std::set<std::string> expected;
    for (const ExpressionTask& task : dataset.expressions) {
        const UnitKey key{task.sequence_id, task.expression_id};
        const fs::path file = dir / prediction_file_name(key);
        expected.insert(file.filename().string());
        if (!fs::exists(file)) {
            if (strict) throw Error("MISSING_PREDICTIONS", "no prediction file for this unit", file.string());
            out.warnings.push_back(fmt::format("{}: missing, treated as empty predictions", file.string()));
            continue;
        }
        out.predictions.emplace(key, parse_predictions(file));
        out.files.push_back(file);
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".txt" && !expected.contains(entry.path().filename().string())) {
            out.warnings.push_back(fmt::format("{}: no matching expression unit, ignored", entry.path().string()));
        }
    }
    std::sort(out.files.begin(), out.files.end());
    return out;
}

void save_predictions(const fs::path& dir, const PredictionSet& predictions) {
    fs::create_directories(dir);
    for (const auto& [key, dets] : predictions) write_predictions(dir / prediction_file_name(key), dets);
}

DatasetLoad load_dataset(const fs::path& dir, std::optional<fs::path> attribute_dir) {
    if (!fs::is_directory(dir)) throw Error("FILE_NOT_FOUND", "dataset directory does not exist", dir.string());
    DatasetLoad out;
    Dataset& ds = out.dataset;

    const fs::path manifest = dir / "manifest.json";
    if (fs::exists(manifest)) {
        json doc;
        try {
            doc = json::parse(read_file(manifest));
        } catch (const json::parse_error& e) {
            throw Error("MALFORMED_DOCUMENT", e.what(), manifest.string());
        }
        out.files.push_back(manifest);
        for (const json& s : doc.value("sequences", json::array())) {
            Sequence seq;
            seq.id = json_string(s, "id", manifest);
            seq.length = json_int(s, "length", manifest);
            const std::string split = s.value("split", std::string("unspecified"));
            const auto parsed = split_from_name(split);
            if (!parsed) throw Error("MALFORMED_DOCUMENT", fmt::format("unknown split '{}'", split), manifest.string());
            seq.split = *parsed;
            ds.sequences.push_back(std::move(seq));
        }
    } else if (fs::is_directory(dir / "gt")) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir / "gt")) {
            if (entry.path().extension() == ".txt") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& f : files) ds.sequences.push_back({f.stem().string(), 0, Split::Unspecified, {}});
    }
    if (ds.sequences.empty()) throw Error("NO_SEQUENCES", "no sequences found", dir.string());

    const bool infer_length = !fs::exists(manifest);
    for (Sequence& seq : ds.sequences) {
        const fs::path gt = dir / "gt" / (seq.id + ".txt");
        seq.tracks = parse_gt(gt);
        out.files.push_back(gt);
        if (infer_length) {
            for (const GroundTruthTrack& t : seq.tracks) {
                if (!t.boxes.empty()) seq.length = std::max(seq.length, t.boxes.rbegin()->first);
            }
        }
    }

    const fs::path exprs = dir / "expressions.json";
    if (fs::exists(exprs)) {
        ExpressionParseResult parsed = parse_expressions(exprs, ds.sequences);
        ds.expressions = std::move(parsed.tasks);
        out.warnings.insert(out.warnings.end(), parsed.warnings.begin(), parsed.warnings.end());
        out.files.push_back(exprs);
    } else {
        out.warnings.push_back(fmt::format("{}: missing, dataset has no expressions", exprs.string()));
    }

    const fs::path attrs = attribute_dir.value_or(dir / "attributes");
    if (fs::is_directory(attrs)) {
        for (const Sequence& seq : ds.sequences) {
            const fs::path file = attrs / (seq.id + ".txt");
            if (!fs::exists(file)) {
                out.warnings.push_back(fmt::format("{}: no attribute labels", file.string()));
                continue;
            }
            ds.attributes.push_back(parse_attributes(file, seq.id, seq.length));
            out.files.push_back(file);
        }
    } else if (attribute_dir) {
        throw Error("FILE_NOT_FOUND", "attribute directory does not exist", attrs.string());
    }
    return out;
}

void save_dataset(const fs::path& dir, const Dataset& dataset) {
    fs::create_directories(dir / "gt");
    ordered_json seqs = ordered_json::array();
    for (const Sequence& s : dataset.sequences) {
        seqs.push_back({{"id", s.id}, {"length", s.length}, {"split", std::string(split_name(s.split))}});
        write_gt(dir / "gt" / (s.id + ".txt"), s.tracks);
    }
    ordered_json manifest = {{"sequences", std::move(seqs)}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    write_expressions(dir / "expressions.json", dataset.expressions);
    for (const AttributeFrameLabels& a : dataset.attributes) write_attributes(dir / "attributes" / (a.sequence_id + ".txt"), a);
}

std::string sha256_file(const fs::path& path) {
    const std::string data = read_file(path);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("DIGEST_FAILED", "SHA-256 computation failed", path.string());
    }
    std::string hex;
    hex.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace rmot::io
