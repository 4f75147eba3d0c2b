#include "prfront/gantt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <optional>

namespace prfront {

namespace {

constexpr int kLeft = 90;
constexpr int kTop = 30;
constexpr int kLaneHeight = 28;
constexpr int kLaneGap = 8;
constexpr int kPlotWidth = 900;

constexpr std::array<const char*, 8> kPalette{"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                              "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};

struct Span {
    Rational start;
    Rational end;
    bool reconfig = false;
    std::string task;
    long run = 0;
};

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_gantt(const std::vector<Event>& timeline) {
    std::string svg;
    if (timeline.empty()) {
        svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"80\" viewBox=\"0 0 400 80\">\n";
        svg += "<rect x=\"0\" y=\"0\" width=\"400\" height=\"80\" fill=\"white\"/>\n";
        svg += "<text x=\"200\" y=\"45\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
               "empty timeline</text>\n</svg>\n";
        return svg;
    }

    std::map<int, std::vector<Span>> lanes;
    std::map<int, std::optional<Span>> open_pr;
    std::map<int, std::optional<Span>> open_run;
    std::vector<std::string> tasks;  // first-seen order fixes the color of each task
    Rational makespan;

    for (const auto& e : timeline) {
        if (!e.task_name.empty() && std::find(tasks.begin(), tasks.end(), e.task_name) == tasks.end()) {
            tasks.push_back(e.task_name);
        }
        lanes[e.region_id];
        makespan = rational_max(makespan, e.time_ms);
        switch (e.kind) {
            case EventKind::PrStart: open_pr[e.region_id] = Span{e.time_ms, e.time_ms, true, e.task_name, e.run_index}; break;
            case EventKind::RunStart: open_run[e.region_id] = Span{e.time_ms, e.time_ms, false, e.task_name, e.run_index}; break;
            case EventKind::PrEnd:
            case EventKind::RunEnd: {
                auto& slot = e.kind == EventKind::PrEnd ? open_pr[e.region_id] : open_run[e.region_id];
                if (slot) {
                    slot->end = e.time_ms;
                    lanes[e.region_id].push_back(*slot);
                    slot.reset();
                }
                break;
            }
        }
    }

    const int height = kTop + static_cast<int>(lanes.size()) * (kLaneHeight + kLaneGap) + 40;
    const int width = kLeft + kPlotWidth + 20;
    const Rational scale = makespan > 0 ? Rational(kPlotWidth) / makespan : Rational(0);
    auto x_of = [&](const Rational& t) { return to_fixed(Rational(kLeft) + t * scale, 3); };
    auto w_of = [&](const Rational& a, const Rational& b) { return to_fixed((b - a) * scale, 3); };
    auto color_of = [&](const std::string& task) {
        const auto idx = static_cast<std::size_t>(std::find(tasks.begin(), tasks.end(), task) - tasks.begin());
        return kPalette[idx % kPalette.size()];
    };

    svg += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
                       width, height);
    svg += "<defs><pattern id=\"pr\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\" "
           "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#ffffff\"/>"
           "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#555555\" stroke-width=\"3\"/></pattern></defs>\n";
    svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);

    int lane_index = 0;
    for (const auto& [region, spans] : lanes) {
        const int y = kTop + lane_index * (kLaneHeight + kLaneGap);
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
                           "region {}</text>\n",
                           kLeft - 8, y + kLaneHeight / 2 + 4, region);
        for (const auto& s : spans) {
            const std::string fill = s.reconfig ? "url(#pr)" : color_of(s.task);
            svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#222222\" "
                               "stroke-width=\"0.5\"><title>{} {} {} ms - {} ms</title></rect>\n",
                               x_of(s.start), y, w_of(s.start, s.end), kLaneHeight, fill,
                               s.reconfig ? "pr" : "run", escape(s.task), to_fixed(s.start, 3), to_fixed(s.end, 3));
        }
        ++lane_index;
    }

    const int axis_y = kTop + lane_index * (kLaneHeight + kLaneGap) + 4;
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#222222\"/>\n", kLeft, axis_y,
                       kLeft + kPlotWidth, axis_y);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">0 ms</text>\n", kLeft,
                       axis_y + 14);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                       "{} ms</text>\n",
                       kLeft + kPlotWidth, axis_y + 14, to_fixed(makespan, 3));

    int legend_x = kLeft;
    for (const auto& task : tasks) {
        svg += fmt::format("<rect x=\"{}\" y=\"8\" width=\"10\" height=\"10\" fill=\"{}\"/>"
                           "<text x=\"{}\" y=\"17\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                           legend_x, color_of(task), legend_x + 14, escape(task));
        legend_x += 24 + 7 * static_cast<int>(task.size());
    }
    svg += fmt::format("<rect x=\"{}\" y=\"8\" width=\"10\" height=\"10\" fill=\"url(#pr)\" stroke=\"#222222\" "
                       "stroke-width=\"0.5\"/><text x=\"{}\" y=\"17\" font-family=\"sans-serif\" font-size=\"11\">"
                       "reconfiguration</text>\n",
                       legend_x, legend_x + 14);
    svg += "</svg>\n";
    return svg;
}

}  // namespace prfront
