#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace tcclock {

// CSV with a header row, '.' decimal separator, locale-independent.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);
    void close();
    ~CsvWriter();

private:
    std::string path_;
    std::string buffer_;
    size_t columns_;
    bool closed_ = false;
};

std::string format_double(double v);

// FNV-1a 64-bit over the file bytes.
uint64_t file_checksum(const std::filesystem::path& path);
std::string checksum_hex(uint64_t checksum);

// Histogram with Freedman-Diaconis binning.
struct Histogram {
    std::vector<double> bin_lo, bin_hi, density;
    double bin_width = 0.0;
};

Histogram histogram_fd(std::vector<double> samples);

// Runs fn(i) for i in [0, count) on a work queue of indices; results must be
// deposited by index so the worker count never changes the output.
void parallel_for(size_t count, unsigned workers, const std::function<void(size_t)>& fn);

}  // namespace tcclock
