#include "taxotrace/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "taxotrace/error.hpp"

namespace taxotrace {

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void put_u16(std::ofstream& out, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

std::int16_t double_to_pcm(double x) {
    double v = std::lround(x * 32767.0);
    if (v > 32767.0) v = 32767.0;
    if (v < -32768.0) v = -32768.0;
    return static_cast<std::int16_t>(v);
}

WavClip read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw TraceError(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
        std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
        throw TraceError(ErrorCode::IoError, "not a RIFF/WAVE file: " + path.string());
    }

    WavClip clip;
    std::size_t pos = 12;
    bool have_fmt = false, have_data = false;
    int channels = 0, bits = 0;
    while (pos + 8 <= buf.size()) {
        const unsigned char* hdr = buf.data() + pos;
        std::uint32_t chunk_size = get_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (body + chunk_size > buf.size()) {
            throw TraceError(ErrorCode::IoError, "truncated chunk in " + path.string());
        }
        if (std::memcmp(hdr, "fmt ", 4) == 0 && chunk_size >= 16) {
            std::uint16_t format = get_u16(buf.data() + body);
            channels = get_u16(buf.data() + body + 2);
            clip.sample_rate = static_cast<int>(get_u32(buf.data() + body + 4));
            bits = get_u16(buf.data() + body + 14);
            if (format != 1) {
                throw TraceError(ErrorCode::IoError, "non-PCM WAV: " + path.string());
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            if (!have_fmt) {
                throw TraceError(ErrorCode::IoError, "data before fmt in " + path.string());
            }
            if (channels != 1 || bits != 16) {
                throw TraceError(ErrorCode::IoError,
                                 "expected mono 16-bit PCM: " + path.string());
            }
            std::size_t n = chunk_size / 2;
            clip.samples.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                std::uint16_t raw = get_u16(buf.data() + body + 2 * i);
                clip.samples[i] = static_cast<std::int16_t>(raw);
            }
            have_data = true;
        }
        pos = body + chunk_size + (chunk_size & 1);
    }
    if (!have_data) {
        throw TraceError(ErrorCode::IoError, "no data chunk in " + path.string());
    }
    return clip;
}

void write_wav(const std::filesystem::path& path, const std::vector<std::int16_t>& samples,
               int sample_rate) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw TraceError(ErrorCode::IoError, "cannot write " + path.string());
    }
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    out.write("RIFF", 4);
    put_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, static_cast<std::uint32_t>(sample_rate));
    put_u32(out, static_cast<std::uint32_t>(sample_rate * 2));
    put_u16(out, 2);
    put_u16(out, 16);
    out.write("data", 4);
    put_u32(out, data_bytes);
    for (std::int16_t s : samples) {
        put_u16(out, static_cast<std::uint16_t>(s));
    }
    if (!out) {
        throw TraceError(ErrorCode::IoError, "write failed for " + path.string());
    }
}

}  // namespace taxotrace
