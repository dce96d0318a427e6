#include "rotocr/backend.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "rotocr/error.hpp"
#include "rotocr/subprocess.hpp"
#include "rotocr/utf8.hpp"

namespace rotocr {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool is_score(double s) { return std::isfinite(s) && s >= 0.0 && s <= 1.0; }

// Byte offsets at which the elements of the top-level array `key` start.
// Only called on text that already parsed as JSON.
std::vector<std::size_t> array_element_offsets(std::string_view raw, std::string_view key) {
    std::vector<std::size_t> offsets;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    std::size_t string_start = 0;
    std::string_view last_string;
    bool key_matched = false;  // saw `"key":` at depth 1
    int target_depth = -1;     // depth inside the target array
    bool expect_element = false;

    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') {
                in_string = false;
                last_string = raw.substr(string_start + 1, i - string_start - 1);
            }
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
        if (expect_element && c != ']') {
            offsets.push_back(i);
            expect_element = false;
        }
        switch (c) {
            case '"':
                in_string = true;
                string_start = i;
                break;
            case ':':
                key_matched = depth == 1 && last_string == key && target_depth < 0;
                break;
            case '{':
            case '[':
                ++depth;
                if (c == '[' && key_matched && depth == 2) {
                    target_depth = depth;
                    expect_element = true;
                }
                key_matched = false;
                break;
            case '}':
            case ']':
                if (depth == target_depth) return offsets;
                --depth;
                break;
            case ',':
                if (depth == target_depth) expect_element = true;
                key_matched = false;
                break;
            default:
                key_matched = false;
                break;
        }
    }
    return offsets;
}

[[noreturn]] void schema_error(std::size_t offset, const std::string& what) {
    throw Error(ErrorKind::Schema, "invalid backend response at byte " + std::to_string(offset) + ": " + what);
}

Detection detection_from_json(const json& j, std::size_t offset, std::size_t index) {
    const std::string where = "detection " + std::to_string(index) + ": ";
    if (!j.is_object()) schema_error(offset, where + "not an object");
    for (const char* field : {"polygon", "text", "det_score", "rec_score"}) {
        if (!j.contains(field)) schema_error(offset, where + "missing field '" + field + "'");
    }
    const json& poly = j.at("polygon");
    if (!poly.is_array() || poly.size() != 8) {
        schema_error(offset, where + "polygon must hold exactly 8 numbers (4 points)");
    }
    std::array<Point, 4> pts{};
    for (std::size_t k = 0; k < 8; ++k) {
        if (!poly[k].is_number()) schema_error(offset, where + "polygon entries must be numbers");
        const double v = poly[k].get<double>();
        if (k % 2 == 0) pts[k / 2].x = v;
        else pts[k / 2].y = v;
    }
    if (!j.at("text").is_string()) schema_error(offset, where + "text must be a string");
    if (!j.at("det_score").is_number() || !j.at("rec_score").is_number()) {
        schema_error(offset, where + "scores must be numbers");
    }
    std::optional<Quad> box;
    try {
        box.emplace(pts);
    } catch (const Error& e) {
        schema_error(offset, where + e.what());
    }
    Detection d{*box, j.at("text").get<std::string>(), j.at("det_score").get<double>(),
                j.at("rec_score").get<double>()};
    try {
        validate(d);
    } catch (const Error& e) {
        schema_error(offset, where + e.what());
    }
    return d;
}

std::atomic<std::uint64_t> temp_counter{0};

class TempFile {
public:
    TempFile() {
        path_ = std::filesystem::temp_directory_path() /
                ("rotocr-" + std::to_string(getpid()) + "-" + std::to_string(temp_counter.fetch_add(1)) + ".png");
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace

void validate(const Detection& d) {
    if (!is_score(d.det_score)) throw Error(ErrorKind::InvalidInput, "det_score outside [0, 1]");
    if (!is_score(d.rec_score)) throw Error(ErrorKind::InvalidInput, "rec_score outside [0, 1]");
    if (d.text.empty() && d.rec_score != 0.0) {
        throw Error(ErrorKind::InvalidInput, "empty text requires rec_score 0");
    }
}

BackendConfig BackendConfig::parse(std::string_view spec) {
    BackendConfig cfg;
    if (spec == "mock") return cfg;
    if (spec.starts_with("cmd:") && spec.size() > 4) {
        cfg.kind = Kind::Subprocess;
        cfg.subprocess.command = std::string(spec.substr(4));
        return cfg;
    }
    throw Error(ErrorKind::Config, "unknown backend '" + std::string(spec) + "' (expected mock or cmd:<command>)");
}

std::string BackendConfig::spec() const {
    return kind == Kind::Mock ? std::string("mock") : "cmd:" + subprocess.command;
}

void BackendConfig::validate() const {
    if (kind == Kind::Mock) {
        if (!(mock.tolerance > 0.0 && mock.tolerance <= 90.0)) {
            throw Error(ErrorKind::Config, "mock tolerance must lie in (0, 90] degrees");
        }
    } else {
        if (subprocess.command.empty()) throw Error(ErrorKind::Config, "backend command is empty");
        if (!(subprocess.timeout_seconds > 0.0) || !std::isfinite(subprocess.timeout_seconds)) {
            throw Error(ErrorKind::Config, "backend timeout must be positive");
        }
    }
}

std::string corrupt_text(std::string_view text) {
    std::u32string cps = utf8::decode(text);
    if (cps.empty()) return std::string(text);
    const std::uint64_t h = fnv1a(text);
    const std::size_t pos = h % cps.size();
    const auto shift = static_cast<char32_t>((h >> 32) % 25 + 1);
    char32_t& c = cps[pos];
    if (c >= U'a' && c <= U'z') c = U'a' + (c - U'a' + shift) % 26;
    else if (c >= U'A' && c <= U'Z') c = U'A' + (c - U'A' + shift) % 26;
    else if (c >= U'0' && c <= U'9') c = U'0' + (c - U'0' + shift % 9 + 1) % 10;
    else c = (c == U'?') ? U'!' : U'?';
    return utf8::encode(cps);
}

std::vector<Detection> run_mock(const MockOptions& options, const ImageRef& img) {
    if (!img.is_virtual()) {
        throw Error(ErrorKind::InvalidInput, "mock backend needs a virtual scene, got raster '" + img.id() + "'");
    }
    const double tau = options.tolerance;
    std::vector<Detection> out;
    for (const TextInstance& inst : img.scene().instances) {
        const double theta = std::abs(fold_degrees(inst.orientation));
        if (theta > tau) continue;
        const double frac = theta / tau;
        std::string text = (options.corruption && theta > 0.5 * tau) ? corrupt_text(inst.text) : inst.text;
        out.push_back(Detection{inst.box(), std::move(text), 0.95 - 0.3 * frac, 0.9 - 0.4 * frac});
    }
    return out;
}

std::string make_request(std::string_view id, std::string_view image_path) {
    return json{{"id", id}, {"image_path", image_path}}.dump();
}

std::string make_response(std::string_view id, const std::vector<Detection>& detections) {
    json dets = json::array();
    for (const Detection& d : detections) {
        json poly = json::array();
        for (const Point& p : d.box.vertices()) {
            poly.push_back(p.x);
            poly.push_back(p.y);
        }
        dets.push_back({{"polygon", poly}, {"text", d.text}, {"det_score", d.det_score}, {"rec_score", d.rec_score}});
    }
    return json{{"id", id}, {"detections", dets}}.dump();
}

std::vector<Detection> validate_response(std::string_view raw_line, std::string* id_out) {
    json j;
    try {
        j = json::parse(raw_line);
    } catch (const json::parse_error& e) {
        schema_error(e.byte > 0 ? e.byte - 1 : 0, "malformed JSON");
    }
    if (!j.is_object()) schema_error(0, "response must be a JSON object");
    if (!j.contains("id") || !j.at("id").is_string()) schema_error(0, "missing string field 'id'");
    const std::string id = j.at("id").get<std::string>();
    if (id_out) *id_out = id;

    if (j.contains("error")) {
        const json& err = j.at("error");
        throw Error(ErrorKind::Backend,
                    "backend error for request '" + id + "': " + (err.is_string() ? err.get<std::string>() : err.dump()));
    }
    if (!j.contains("detections") || !j.at("detections").is_array()) {
        schema_error(0, "missing array field 'detections'");
    }
    const json& arr = j.at("detections");
    std::vector<std::size_t> offsets;
    if (!arr.empty()) offsets = array_element_offsets(raw_line, "detections");

    std::vector<Detection> out;
    out.reserve(arr.size());
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::size_t offset = k < offsets.size() ? offsets[k] : 0;
        out.push_back(detection_from_json(arr[k], offset, k));
    }
    return out;
}

std::vector<Detection> MockBackend::detect(const ImageRef& img, std::string_view) {
    return run_mock(options_, img);
}

SubprocessBackend::SubprocessBackend(SubprocessOptions options)
    : options_(std::move(options)), child_(std::make_unique<ChildProcess>(options_.command)) {}

SubprocessBackend::~SubprocessBackend() = default;

std::vector<Detection> SubprocessBackend::detect_file(const std::string& absolute_png_path,
                                                      std::string_view request_id) {
    child_->write_line(make_request(request_id, absolute_png_path));
    const std::string line = child_->read_line(options_.timeout_seconds);
    std::string echoed;
    std::vector<Detection> detections;
    try {
        detections = validate_response(line, &echoed);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Schema) throw;
        throw Error(ErrorKind::Backend, std::string("malformed response: ") + e.what());
    }
    if (echoed != request_id) {
        throw Error(ErrorKind::Backend,
                    "backend answered request '" + echoed + "' while '" + std::string(request_id) + "' was pending");
    }
    return detections;
}

std::vector<Detection> SubprocessBackend::detect(const ImageRef& img, std::string_view request_id) {
    if (!img.is_raster()) {
        throw Error(ErrorKind::InvalidInput, "subprocess backend needs a raster image, got scene '" + img.id() + "'");
    }
    TempFile tmp;
    save_png(img.raster(), tmp.path());
    return detect_file(std::filesystem::absolute(tmp.path()).string(), request_id);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg) {
    cfg.validate();
    if (cfg.kind == BackendConfig::Kind::Mock) return std::make_unique<MockBackend>(cfg.mock);
    return std::make_unique<SubprocessBackend>(cfg.subprocess);
}

std::vector<Detection> run_backend(const BackendConfig& cfg, const ImageRef& img) {
    return make_backend(cfg)->detect(img, img.id());
}

}  // namespace rotocr
