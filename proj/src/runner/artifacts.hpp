#pragma once

#include "stirap/runner.hpp"

#include <chrono>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace stirap::runner {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> footer;  // written as "#..." records after the body

    std::string render() const;
};

// 12 significant digits, "nan"/"inf" spelled out.
std::string format_number(double v);

std::string sha256_hex(const std::string& bytes);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series);

// Files of one command run. Each write goes to a temporary name and is
// renamed into place; if the session is destroyed before commit(), every
// file it produced is removed again.
class OutputSession {
public:
    OutputSession(std::filesystem::path dir, std::string command);
    ~OutputSession();
    OutputSession(const OutputSession&) = delete;
    OutputSession& operator=(const OutputSession&) = delete;

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path manifest_path() const;

    void write(const std::string& name, const std::string& content);

    void stage_done(const std::string& stage, std::chrono::steady_clock::time_point started);

    // Writes the manifest last and disarms the cleanup.
    RunResult commit(const ExperimentConfig& config);

private:
    std::filesystem::path dir_;
    std::string command_;
    std::mutex mutex_;
    std::vector<Artifact> artifacts_;
    std::vector<StageTiming> timings_;
    std::vector<std::filesystem::path> created_;
    bool committed_ = false;
};

}  // namespace stirap::runner
