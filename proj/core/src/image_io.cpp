#include "platefocus/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "platefocus/errors.hpp"
#include "platefocus/ssim.hpp"

namespace platefocus {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    return os;
}

// Header token reader honoring '#' comments.
std::string next_token(std::istream& is, std::vector<std::string>& comments) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            std::string line;
            std::getline(is, line);
            if (!line.empty() && line.front() == ' ') line.erase(0, 1);
            comments.push_back(line);
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

}  // namespace

void write_pgm16(std::ostream& os, const Field& image, const std::vector<std::string>& comments) {
    double peak = 0.0;
    for (double v : image.values()) peak = std::max(peak, v);
    os << "P5\n# max_value " << fmt17(peak) << '\n';
    for (const std::string& c : comments) os << "# " << c << '\n';
    os << image.nx() << ' ' << image.ny() << "\n65535\n";
    std::string row;
    row.reserve(static_cast<std::size_t>(image.nx()) * 2);
    for (int iy = 0; iy < image.ny(); ++iy) {
        row.clear();
        for (int ix = 0; ix < image.nx(); ++ix) {
            const double v = image(ix, iy);
            const double scaled = peak > 0.0 && v > 0.0 ? std::round(v / peak * 65535.0) : 0.0;
            const auto q = static_cast<std::uint16_t>(std::min(scaled, 65535.0));
            row.push_back(static_cast<char>(q >> 8));
            row.push_back(static_cast<char>(q & 0xFF));
        }
        os.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

void save_pgm16(const std::string& path, const Field& image, const std::vector<std::string>& comments) {
    auto os = open_out(path);
    write_pgm16(os, image, comments);
    if (!os) throw Error(ErrorKind::Io, "failed writing " + path);
}

void write_pgm16_signed(std::ostream& os, const Field& image, const std::vector<std::string>& comments) {
    const double peak = max_abs(image);
    os << "P5\n# max_abs " << fmt17(peak) << '\n';
    for (const std::string& c : comments) os << "# " << c << '\n';
    os << image.nx() << ' ' << image.ny() << "\n65535\n";
    std::string row;
    row.reserve(static_cast<std::size_t>(image.nx()) * 2);
    for (int iy = 0; iy < image.ny(); ++iy) {
        row.clear();
        for (int ix = 0; ix < image.nx(); ++ix) {
            const double unit = peak > 0.0 ? image(ix, iy) / peak : 0.0;
            const double scaled = std::clamp(std::round((unit + 1.0) * 0.5 * 65535.0), 0.0, 65535.0);
            const auto q = static_cast<std::uint16_t>(scaled);
            row.push_back(static_cast<char>(q >> 8));
            row.push_back(static_cast<char>(q & 0xFF));
        }
        os.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

void save_pgm16_signed(const std::string& path, const Field& image, const std::vector<std::string>& comments) {
    auto os = open_out(path);
    write_pgm16_signed(os, image, comments);
    if (!os) throw Error(ErrorKind::Io, "failed writing " + path);
}

Pgm16 read_pgm16(std::istream& is) {
    Pgm16 pgm;
    std::vector<std::string> comments;
    if (next_token(is, comments) != "P5") throw Error(ErrorKind::BadMagic, "not a binary PGM (P5)");
    try {
        pgm.width = std::stoi(next_token(is, comments));
        pgm.height = std::stoi(next_token(is, comments));
        const int maxval = std::stoi(next_token(is, comments));
        if (maxval != 65535) throw Error(ErrorKind::Config, "only 16-bit PGM (maxval 65535) is supported");
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::Truncated, "malformed PGM header");
    }
    if (pgm.width <= 0 || pgm.height <= 0) throw Error(ErrorKind::Truncated, "malformed PGM dimensions");
    for (const std::string& c : comments) {
        if (c.rfind("max_value ", 0) == 0) {
            pgm.max_value = std::stod(c.substr(10));
        } else if (c.rfind("max_abs ", 0) == 0) {
            pgm.max_value = std::stod(c.substr(8));
            pgm.is_signed = true;
        }
        else
            pgm.comments.push_back(c);
    }
    const std::size_t n = static_cast<std::size_t>(pgm.width) * static_cast<std::size_t>(pgm.height);
    std::string raw(n * 2, '\0');
    if (!is.read(raw.data(), static_cast<std::streamsize>(raw.size()))) throw Error(ErrorKind::Truncated, "PGM raster is short");
    pgm.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        pgm.pixels[i] = static_cast<std::uint16_t>((static_cast<unsigned char>(raw[2 * i]) << 8) |
                                                   static_cast<unsigned char>(raw[2 * i + 1]));
    return pgm;
}

Pgm16 load_pgm16(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
    return read_pgm16(is);
}

Field Pgm16::to_field() const {
    Field f(width, height);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const double unit = pixels[i] / 65535.0;
        f[i] = is_signed ? (2.0 * unit - 1.0) * max_value : unit * max_value;
    }
    return f;
}

void write_csv(std::ostream& os, const Field& image, const std::vector<std::string>& comments) {
    for (const std::string& c : comments) os << "# " << c << '\n';
    for (int iy = 0; iy < image.ny(); ++iy) {
        for (int ix = 0; ix < image.nx(); ++ix) {
            if (ix) os << ',';
            os << fmt17(image(ix, iy));
        }
        os << '\n';
    }
}

void save_csv(const std::string& path, const Field& image, const std::vector<std::string>& comments) {
    auto os = open_out(path);
    write_csv(os, image, comments);
    if (!os) throw Error(ErrorKind::Io, "failed writing " + path);
}

Field side_by_side(const Field& left, const Field& right, int gap) {
    const Field l = normalize_by_max(left);
    const Field r = normalize_by_max(right);
    Field out(l.nx() + gap + r.nx(), std::max(l.ny(), r.ny()), 0.0);
    for (int iy = 0; iy < l.ny(); ++iy)
        for (int ix = 0; ix < l.nx(); ++ix) out(ix, iy) = l(ix, iy);
    for (int iy = 0; iy < r.ny(); ++iy)
        for (int ix = 0; ix < r.nx(); ++ix) out(l.nx() + gap + ix, iy) = r(ix, iy);
    return out;
}

}  // namespace platefocus
