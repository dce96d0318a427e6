// Test double for the backend wire protocol. Usage: fake_ocr_server MODE [ARG]
//
//   golden FILE   answer every request with the detections of FILE's first line
//   blob          detect the bounding box of bright pixels in the request PNG
//   error         answer with an error object
//   malformed     answer with a line that is not JSON
//   wrong-id      answer with a different id
//   hang          read one request and never answer
//   exit          read one request and exit with status 3
//   noisy FILE    like golden, with chatter on stderr

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "json.hpp"
#include "rotocr/imaging.hpp"

using nlohmann::json;

namespace {

json golden_detections(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    return json::parse(line).at("detections");
}

json blob(const std::string& png) {
    const rotocr::Raster r = rotocr::load_png(png);
    int x0 = r.width, y0 = r.height, x1 = -1, y1 = -1;
    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            if (r.pixel(x, y)[0] > 128) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        }
    }
    json dets = json::array();
    if (x1 < 0) return dets;
    const double a = x0, b = y0, c = x1 + 1, d = y1 + 1;
    dets.push_back({{"polygon", {a, b, c, b, c, d, a, d}}, {"text", "blob"}, {"det_score", 0.9}, {"rec_score", 0.8}});
    return dets;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: fake_ocr_server MODE [ARG]\n";
        return 64;
    }
    const std::string mode = argv[1];
    const std::string arg = argc > 2 ? argv[2] : "";
    json golden;
    if (mode == "golden" || mode == "noisy") golden = golden_detections(arg);

    std::string line;
    while (std::getline(std::cin, line)) {
        json req;
        try {
            req = json::parse(line);
        } catch (const json::exception&) {
            std::cout << json{{"id", "?"}, {"error", "malformed request"}}.dump() << std::endl;
            continue;
        }
        const std::string id = req.value("id", "?");
        if (mode == "hang") {
            std::this_thread::sleep_for(std::chrono::seconds(30));
            return 0;
        }
        if (mode == "exit") return 3;
        if (mode == "noisy") {
            for (int i = 0; i < 2000; ++i) std::cerr << "loading weights " << i << "\n";
        }

        json out;
        if (mode == "golden" || mode == "noisy") {
            out = {{"id", id}, {"detections", golden}};
        } else if (mode == "blob") {
            try {
                out = {{"id", id}, {"detections", blob(req.at("image_path").get<std::string>())}};
            } catch (const std::exception& e) {
                out = {{"id", id}, {"error", e.what()}};
            }
        } else if (mode == "error") {
            out = {{"id", id}, {"error", "model exploded"}};
        } else if (mode == "malformed") {
            std::cout << "{\"id\": \"" << id << "\", \"detections\": [" << std::endl;
            continue;
        } else if (mode == "wrong-id") {
            out = {{"id", id + "-other"}, {"detections", json::array()}};
        } else {
            std::cerr << "unknown mode " << mode << "\n";
            return 64;
        }
        std::cout << out.dump() << std::endl;
    }
    return 0;
}
