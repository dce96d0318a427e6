#include "rotocr/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <tuple>

#include "rotocr/error.hpp"
#include "rotocr/utf8.hpp"

namespace rotocr {

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    // single-row DP over the shorter string
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
            diag = up;
        }
    }
    return row[b.size()];
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    return edit_distance(utf8::decode(a), utf8::decode(b));
}

EvalReport evaluate(std::span<const EvalSample> samples, bool case_sensitive, std::string method) {
    if (samples.empty()) throw Error(ErrorKind::Eval, "cannot evaluate an empty sample list");
    std::size_t correct = 0;
    double ed_sum = 0.0;
    double norm_sum = 0.0;
    for (const EvalSample& s : samples) {
        std::u32string gt = utf8::decode(case_sensitive ? s.ground_truth : utf8::to_lower(s.ground_truth));
        std::u32string pred = utf8::decode(case_sensitive ? s.prediction : utf8::to_lower(s.prediction));
        if (gt.empty()) throw Error(ErrorKind::Eval, "sample '" + s.id + "' has an empty ground truth");
        const std::size_t ed = edit_distance(gt, pred);
        if (ed == 0) ++correct;
        ed_sum += static_cast<double>(ed);
        norm_sum += static_cast<double>(ed) / static_cast<double>(gt.size());
    }
    const auto n = static_cast<double>(samples.size());
    return EvalReport{std::move(method), static_cast<double>(correct) / n, ed_sum / n, norm_sum / n, samples.size()};
}

std::vector<EvalSample> match_predictions(std::span<const MergeCandidate> predictions,
                                          std::span<const GroundTruth> ground_truths) {
    struct Pair {
        double iou;
        std::size_t gt;
        std::size_t pred;
    };
    std::vector<Pair> pairs;
    for (std::size_t g = 0; g < ground_truths.size(); ++g) {
        for (std::size_t p = 0; p < predictions.size(); ++p) {
            const double v = iou(ground_truths[g].box, predictions[p].box);
            if (v >= kMatchIou) pairs.push_back({v, g, p});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return std::tie(b.iou, a.gt, a.pred) < std::tie(a.iou, b.gt, b.pred);
    });

    std::vector<EvalSample> out;
    out.reserve(ground_truths.size());
    for (const GroundTruth& g : ground_truths) out.push_back({g.id, g.text, {}});
    std::vector<bool> gt_used(ground_truths.size(), false);
    std::vector<bool> pred_used(predictions.size(), false);
    for (const Pair& pr : pairs) {
        if (gt_used[pr.gt] || pred_used[pr.pred]) continue;
        gt_used[pr.gt] = true;
        pred_used[pr.pred] = true;
        out[pr.gt].prediction = predictions[pr.pred].text;
    }
    return out;
}

std::string format_report_table(std::span<const EvalReport> rows) {
    std::size_t width = std::string_view("Method").size();
    for (const EvalReport& r : rows) width = std::max(width, r.method.size());
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-*s | %8s | %7s | %8s | %6s\n", static_cast<int>(width), "Method", "Accuracy",
                  "Avg. ED", "Norm. ED", "N");
    os << buf << std::string(width, '-') << "-+----------+---------+----------+-------\n";
    for (const EvalReport& r : rows) {
        std::snprintf(buf, sizeof buf, "%-*s | %8.3f | %7.2f | %8.2f | %6zu\n", static_cast<int>(width),
                      r.method.c_str(), r.accuracy, r.avg_ed, r.norm_ed, r.samples);
        os << buf;
    }
    return os.str();
}

std::string format_report_csv(std::span<const EvalReport> rows) {
    std::ostringstream os;
    os << "method,accuracy,avg_ed,norm_ed,n\n";
    char buf[128];
    for (const EvalReport& r : rows) {
        std::string method = r.method;
        if (method.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : method) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            method = quoted + "\"";
        }
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%zu\n", r.accuracy, r.avg_ed, r.norm_ed, r.samples);
        os << method << buf;
    }
    return os.str();
}

}  // namespace rotocr
