#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rotocr/geometry.hpp"
#include "rotocr/imaging.hpp"

namespace rotocr {

/// One finding of an OCR engine, in the coordinates of the image it was shown.
struct Detection {
    Quad box;
    std::string text;
    double det_score = 0.0;  // detector confidence
    double rec_score = 0.0;  // recognizer confidence

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Scores in [0, 1]; empty text only with a zero recognition score.
void validate(const Detection& d);

struct MockOptions {
    double tolerance = 10.0;  // degrees; readable iff |folded orientation| <= tolerance
    bool corruption = false;
};

struct SubprocessOptions {
    std::string command;  // run through /bin/sh -c
    double timeout_seconds = 60.0;
};

struct BackendConfig {
    enum class Kind { Mock, Subprocess };

    Kind kind = Kind::Mock;
    MockOptions mock;
    SubprocessOptions subprocess;

    /// "mock" or "cmd:<command line>".
    static BackendConfig parse(std::string_view spec);
    std::string spec() const;

    /// Throws Error(Config) on out-of-range settings.
    void validate() const;
};

/// Deterministic character substitution used by the mock's corruption mode.
/// The position is picked by a hash of the text; the result always differs
/// from the input.
std::string corrupt_text(std::string_view text);

/// Mock engine: reads every scene instance presented within `tolerance` of
/// horizontal, with confidence falling linearly towards the tolerance edge.
std::vector<Detection> run_mock(const MockOptions& options, const ImageRef& img);

/// Wire request line (no trailing newline).
std::string make_request(std::string_view id, std::string_view image_path);

/// Parses one response line. Throws Error(Schema) with a byte offset on any
/// schema violation and Error(Backend) when the line is an error object.
/// The echoed id is stored in `id_out` when given.
std::vector<Detection> validate_response(std::string_view raw_line, std::string* id_out = nullptr);

/// Serializes a response line in the same schema validate_response accepts.
std::string make_response(std::string_view id, const std::vector<Detection>& detections);

/// The engine abstraction. Instances are not thread-safe; the pipeline gives
/// each worker thread its own.
class Backend {
public:
    virtual ~Backend() = default;

    /// `request_id` tags the call for diagnostics and wire correlation.
    virtual std::vector<Detection> detect(const ImageRef& img, std::string_view request_id) = 0;
};

class MockBackend final : public Backend {
public:
    explicit MockBackend(MockOptions options) : options_(options) {}
    std::vector<Detection> detect(const ImageRef& img, std::string_view request_id) override;

private:
    MockOptions options_;
};

class ChildProcess;

/// Long-lived child speaking the line protocol; rasters are handed over as
/// temporary PNG files.
class SubprocessBackend final : public Backend {
public:
    explicit SubprocessBackend(SubprocessOptions options);
    ~SubprocessBackend() override;

    std::vector<Detection> detect(const ImageRef& img, std::string_view request_id) override;

    /// Sends an already-written PNG; used by detect() and by protocol tests.
    std::vector<Detection> detect_file(const std::string& absolute_png_path, std::string_view request_id);

private:
    SubprocessOptions options_;
    std::unique_ptr<ChildProcess> child_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg);

/// One-shot convenience: builds a backend, runs it once.
std::vector<Detection> run_backend(const BackendConfig& cfg, const ImageRef& img);

}  // namespace rotocr
