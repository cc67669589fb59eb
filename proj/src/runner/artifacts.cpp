#include "artifacts.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace stirap::runner {

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string CsvTable::render() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += (i ? "," : "") + header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += format_number(row[i]);
        }
        out += '\n';
    }
    for (const auto& f : footer) {
        out += '#' + f + '\n';
    }
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    const double w = 640, h = 420, left = 70, right = 20, top = 40, bottom = 55;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
    if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
    auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right << "\" height=\""
      << h - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        o << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 16 << "\" text-anchor=\"middle\">"
          << format_number(std::round(xv * 1e4) / 1e4) << "</text>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
          << format_number(std::round(yv * 1e4) / 1e4) << "</text>\n";
    }
    o << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    o << "<text transform=\"translate(16," << h / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << y_label
      << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % 6];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            o << buf;
        }
        o << "\"/>\n";
        o << "<text x=\"" << w - right - 8 << "\" y=\"" << top + 16 + 15 * static_cast<double>(k)
          << "\" text-anchor=\"end\" fill=\"" << color << "\">" << s.label << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

OutputSession::OutputSession(std::filesystem::path dir, std::string command)
    : dir_(std::move(dir)), command_(std::move(command)) {
    std::filesystem::create_directories(dir_);
}

OutputSession::~OutputSession() {
    if (committed_) {
        return;
    }
    std::error_code ec;
    for (const auto& p : created_) {
        std::filesystem::remove(p, ec);
        std::filesystem::remove(p.string() + ".tmp", ec);
    }
}

std::filesystem::path OutputSession::manifest_path() const { return dir_ / ("manifest_" + command_ + ".json"); }

void OutputSession::write(const std::string& name, const std::string& content) {
    const std::filesystem::path target = dir_ / name;
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::lock_guard lock(mutex_);
        created_.push_back(target);
    }
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
    std::lock_guard lock(mutex_);
    artifacts_.push_back({name, sha256_hex(content), static_cast<std::uintmax_t>(content.size())});
}

void OutputSession::stage_done(const std::string& stage, std::chrono::steady_clock::time_point started) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::lock_guard lock(mutex_);
    timings_.push_back({stage, s});
}

RunResult OutputSession::commit(const ExperimentConfig& config) {
    std::sort(artifacts_.begin(), artifacts_.end(), [](const Artifact& a, const Artifact& b) { return a.name < b.name; });
    nlohmann::json files = nlohmann::json::array();
    for (const auto& a : artifacts_) {
        files.push_back({{"name", a.name}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    }
    nlohmann::json timings = nlohmann::json::array();
    for (const auto& t : timings_) {
        timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    }
    const nlohmann::json manifest = {
        {"command", command_},
        {"version", library_version()},
        {"config", nlohmann::json::parse(dump_config(config))},
        {"files", files},
        {"timings", timings},
    };
    const std::filesystem::path target = manifest_path();
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << manifest.dump(2) << '\n';
        out.close();
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
    committed_ = true;

    RunResult result;
    result.manifest = target;
    result.artifacts = artifacts_;
    result.timings = timings_;
    return result;
}

}  // namespace stirap::runner
