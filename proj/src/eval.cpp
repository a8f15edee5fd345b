#include "swtag/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "swtag/hmm_tagger.hpp"
#include "swtag/lsw_tagger.hpp"

namespace swtag {

EvalReport accuracy(const std::vector<TagId>& pred, const AmbiguousText& gold,
                    const AmbiguityInventory& inv) {
    if (pred.size() != gold.tokens.size())
        throw std::invalid_argument("prediction and gold lengths differ");
    EvalReport report;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const Token& tok = gold.tokens[i];
        if (!tok.gold)
            throw std::invalid_argument("token '" + tok.surface +
                                        "' has no gold tag");
        bool ambiguous = inv.ambiguous(tok.cls);
        bool hit = pred[i] == *tok.gold;
        ++report.total;
        report.correct += hit;
        if (ambiguous) {
            ++report.ambiguous_total;
            report.ambiguous_correct += hit;
        }
    }
    return report;
}

namespace {

// "-1,+1" -> "-1, +1", matching the usual tagger naming.
std::string spaced_window(const WindowSpec& spec) {
    std::string raw = spec.to_string();
    std::string out;
    for (char c : raw) {
        out += c;
        if (c == ',') out += ' ';
    }
    return out;
}

}  // namespace

std::string TaggerConfig::label() const {
    switch (kind) {
        case TaggerKind::kSw:
            return "SW(" + spaced_window(window) + ")";
        case TaggerKind::kLsw:
            return "LSW(" + spaced_window(window) + ")" +
                   (use_rules ? "" : "-No-Rules");
        case TaggerKind::kHmm:
            return "HMM";
    }
    return "?";
}

std::vector<LearningCurve> learning_curve(const std::vector<TaggerConfig>& taggers,
                                          const AmbiguousText& train,
                                          const AmbiguousText& test,
                                          const std::vector<std::size_t>& sizes,
                                          const TagInventory& tags,
                                          const AmbiguityInventory& inv,
                                          const RuleSet* rules) {
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] > train.tokens.size())
            throw std::invalid_argument("training size exceeds the corpus");
        if (i > 0 && sizes[i] <= sizes[i - 1])
            throw std::invalid_argument("training sizes must be strictly increasing");
    }
    for (const auto& cfg : taggers)
        if (cfg.use_rules && rules == nullptr)
            throw std::invalid_argument("configuration '" + cfg.label() +
                                        "' requires a rule set");

    std::vector<LearningCurve> curves;
    for (const auto& cfg : taggers) curves.push_back({cfg.label(), {}});

    for (std::size_t size : sizes) {
        AmbiguousText prefix = train.prefix(size);
        for (std::size_t c = 0; c < taggers.size(); ++c) {
            const TaggerConfig& cfg = taggers[c];
            CurvePoint point;
            point.train_tokens = size;
            std::vector<TagId> pred;
            switch (cfg.kind) {
                case TaggerKind::kSw: {
                    auto counts = count_windows(prefix, cfg.window);
                    SwModel model = sw_train(counts, inv, cfg.train);
                    pred = sw_tag(model, test, inv);
                    point.model_entries = model.entry_count();
                    point.param_bound =
                        std::pow(static_cast<double>(inv.size()),
                                 cfg.window.n_minus + cfg.window.n_plus) *
                        static_cast<double>(tags.size());
                    break;
                }
                case TaggerKind::kLsw: {
                    auto counts = count_windows(prefix, cfg.window);
                    LswModel model =
                        lsw_train(counts, inv, cfg.use_rules ? rules : nullptr,
                                  cfg.train);
                    pred = lsw_tag(model, test, inv);
                    point.model_entries = model.entry_count();
                    point.param_bound = LswModel::param_bound(cfg.window, tags.size());
                    break;
                }
                case TaggerKind::kHmm: {
                    HmmModel init =
                        hmm_init(tags, inv, cfg.use_rules ? rules : nullptr);
                    auto trained = hmm_train(std::move(init), prefix, inv, cfg.train);
                    pred = hmm_tag(trained.model, test, inv);
                    point.model_entries =
                        tags.size() * tags.size() + tags.size() * inv.size();
                    point.param_bound = static_cast<double>(point.model_entries);
                    break;
                }
            }
            EvalReport report = accuracy(pred, test, inv);
            point.accuracy = report.accuracy();
            point.ambiguous_accuracy = report.ambiguous_accuracy();
            curves[c].points.push_back(point);
        }
    }
    return curves;
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

}  // namespace

void emit_csv(const std::vector<LearningCurve>& curves, const std::string& path) {
    if (curves.empty()) throw std::invalid_argument("no curves to emit");
    auto out = open_out(path);
    out << "tagger,train_tokens,accuracy,ambiguous_accuracy\n";
    for (const auto& curve : curves)
        for (const auto& p : curve.points)
            out << csv_quote(curve.label) << ',' << p.train_tokens << ','
                << fmt_double(p.accuracy) << ',' << fmt_double(p.ambiguous_accuracy)
                << '\n';
}

void emit_params_csv(const std::vector<LearningCurve>& curves,
                     const std::string& path) {
    if (curves.empty()) throw std::invalid_argument("no curves to emit");
    auto out = open_out(path);
    out << "tagger,train_tokens,table_entries,param_bound\n";
    for (const auto& curve : curves)
        for (const auto& p : curve.points)
            out << csv_quote(curve.label) << ',' << p.train_tokens << ','
                << p.model_entries << ',' << fmt_double(p.param_bound) << '\n';
}

std::vector<LearningCurve> read_curves_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty CSV");
    std::vector<LearningCurve> curves;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv_split(line);
        if (fields.size() != 4)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 4 CSV fields");
        CurvePoint p;
        p.train_tokens = std::stoull(fields[1]);
        p.accuracy = std::stod(fields[2]);
        p.ambiguous_accuracy = std::stod(fields[3]);
        if (curves.empty() || curves.back().label != fields[0])
            curves.push_back({fields[0], {}});
        curves.back().points.push_back(p);
    }
    return curves;
}

void emit_svg(const std::vector<LearningCurve>& curves, const std::string& path) {
    if (curves.empty()) throw std::invalid_argument("no curves to emit");
    constexpr double kW = 720, kH = 480;
    constexpr double kL = 70, kR = 180, kT = 30, kB = 50;
    const double plot_w = kW - kL - kR, plot_h = kH - kT - kB;

    double x_min = 1e300, x_max = -1e300, y_min = 1.0, y_max = 0.0;
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            x_min = std::min(x_min, static_cast<double>(p.train_tokens));
            x_max = std::max(x_max, static_cast<double>(p.train_tokens));
            y_min = std::min(y_min, p.accuracy);
            y_max = std::max(y_max, p.accuracy);
        }
    }
    if (x_max <= x_min) x_max = x_min + 1;
    y_min = std::max(0.0, y_min - 0.02);
    y_max = std::min(1.0, y_max + 0.02);
    if (y_max <= y_min) y_max = y_min + 0.01;

    auto sx = [&](double x) { return kL + (x - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double y) { return kT + (y_max - y) / (y_max - y_min) * plot_h; };

    static const char* kColors[] = {"#1b6ca8", "#c33c54", "#2a9d3f",
                                    "#e08a00", "#7b4fa6", "#3d3d3d"};
    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
        << "\">\n";
    out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    // axes
    out << "<line x1=\"" << kL << "\" y1=\"" << kT + plot_h << "\" x2=\""
        << kL + plot_w << "\" y2=\"" << kT + plot_h
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL
        << "\" y2=\"" << kT + plot_h << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << kL + plot_w / 2 << "\" y=\"" << kH - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">training tokens</text>\n";
    out << "<text x=\"18\" y=\"" << kT + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
        << kT + plot_h / 2 << ")\">accuracy</text>\n";
    for (int i = 0; i <= 4; ++i) {
        double y = y_min + (y_max - y_min) * i / 4.0;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", y);
        out << "<text x=\"" << kL - 6 << "\" y=\"" << sy(y) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << buf << "</text>\n";
        double x = x_min + (x_max - x_min) * i / 4.0;
        std::snprintf(buf, sizeof buf, "%.0f", x);
        out << "<text x=\"" << sx(x) << "\" y=\"" << kT + plot_h + 16
            << "\" text-anchor=\"middle\" font-size=\"11\">" << buf << "</text>\n";
    }
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = kColors[c % (sizeof kColors / sizeof *kColors)];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : curves[c].points)
            out << sx(static_cast<double>(p.train_tokens)) << ',' << sy(p.accuracy)
                << ' ';
        out << "\"/>\n";
        double ly = kT + 16 + 18 * static_cast<double>(c);
        out << "<line x1=\"" << kL + plot_w + 10 << "\" y1=\"" << ly - 4
            << "\" x2=\"" << kL + plot_w + 34 << "\" y2=\"" << ly - 4
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kL + plot_w + 40 << "\" y=\"" << ly
            << "\" font-size=\"12\">" << curves[c].label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace swtag
