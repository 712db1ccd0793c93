#include "tcclock/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace tcclock {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : path_(path.string()), columns_(columns.size()) {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += columns[i];
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::invalid_argument("csv row width mismatch");
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += format_double(values[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("csv row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += cells[i];
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path_);
    out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    closed_ = true;
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

uint64_t file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    uint64_t h = 0xCBF29CE484222325ULL;
    char buf[8192];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

std::string checksum_hex(uint64_t checksum) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(checksum));
    return buf;
}

Histogram histogram_fd(std::vector<double> samples) {
    Histogram h;
    const size_t n = samples.size();
    if (n < 4) return h;
    std::sort(samples.begin(), samples.end());
    const double q1 = samples[n / 4];
    const double q3 = samples[(3 * n) / 4];
    const double iqr = q3 - q1;
    const double lo = samples.front(), hi = samples.back();
    if (!(hi > lo)) return h;
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
    if (!(width > 0.0)) width = (hi - lo) / std::sqrt(static_cast<double>(n));
    const size_t bins = std::max<size_t>(1, static_cast<size_t>(std::ceil((hi - lo) / width)));
    width = (hi - lo) / static_cast<double>(bins);
    h.bin_width = width;
    std::vector<size_t> counts(bins, 0);
    for (double x : samples) {
        size_t b = static_cast<size_t>((x - lo) / width);
        if (b >= bins) b = bins - 1;
        counts[b]++;
    }
    for (size_t b = 0; b < bins; ++b) {
        h.bin_lo.push_back(lo + b * width);
        h.bin_hi.push_back(lo + (b + 1) * width);
        h.density.push_back(static_cast<double>(counts[b]) / (static_cast<double>(n) * width));
    }
    return h;
}

void parallel_for(size_t count, unsigned workers, const std::function<void(size_t)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace tcclock
