#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace evoflow::csv {

/// 17-significant-digit decimal rendering, locale-independent, so repeated
/// runs produce byte-identical files.
inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

/// Minimal CSV emitter: UTF-8, LF line endings, comma separator.
class Writer {
public:
    Writer(const std::string& path, const std::string& header)
        : out_(path, std::ios::binary)
    {
        if (!out_)
            throw std::runtime_error("csv: cannot open " + path);
        out_ << header << '\n';
    }

    template <class... Ts>
    void row(const Ts&... vals)
    {
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, out_ << field(vals)), ...);
        out_ << '\n';
    }

private:
    static std::string field(double v) { return fmt(v); }
    static std::string field(int v) { return std::to_string(v); }
    static std::string field(long v) { return std::to_string(v); }
    static std::string field(const std::string& s) { return s; }
    static std::string field(const char* s) { return s; }

    std::ofstream out_;
};

}  // namespace evoflow::csv
