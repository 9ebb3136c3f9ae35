#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "platefocus/grid.hpp"

namespace platefocus {

/// 16-bit binary PGM (P5, big-endian samples). Pixel values are v / max *
/// 65535 rounded to nearest; the maximum is kept in a "# max_value" comment
/// so the physical scale survives. Negative values are written as 0.
///
///   P5
///   # max_value <%.17g>
///   # <extra comment lines>
///   <nx> <ny>
///   65535
void write_pgm16(std::ostream& os, const Field& image, const std::vector<std::string>& comments = {});
void save_pgm16(const std::string& path, const Field& image, const std::vector<std::string>& comments = {});

/// Signed variant for displacement frames: pixel = round((v / max_abs + 1) / 2
/// * 65535), with the scale in a "# max_abs" comment instead of "# max_value".
void write_pgm16_signed(std::ostream& os, const Field& image, const std::vector<std::string>& comments = {});
void save_pgm16_signed(const std::string& path, const Field& image, const std::vector<std::string>& comments = {});

struct Pgm16 {
    std::vector<std::uint16_t> pixels;  // row-major
    int width = 0;
    int height = 0;
    double max_value = 0.0;  // from the comment, 0 if absent
    bool is_signed = false;  // a "# max_abs" comment was present
    std::vector<std::string> comments;

    /// Pixels rescaled to physical units using max_value.
    Field to_field() const;
};

Pgm16 read_pgm16(std::istream& is);
Pgm16 load_pgm16(const std::string& path);

/// Row-major CSV (one line per grid row iy), full precision. Optional leading
/// "# ..." comment lines.
void write_csv(std::ostream& os, const Field& image, const std::vector<std::string>& comments = {});
void save_csv(const std::string& path, const Field& image, const std::vector<std::string>& comments = {});

/// Two images next to each other, each scaled to its own maximum, separated
/// by `gap` zero columns.
Field side_by_side(const Field& left, const Field& right, int gap = 4);

}  // namespace platefocus
