#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace platefocus {

/// Dense nx-by-ny scalar field on the plate pixel grid. Pixel (ix, iy) maps
/// to physical (ix * a / (nx-1), iy * b / (ny-1)); storage is row-major with
/// one row per iy, which is also the PGM/CSV scan order.
template <typename T>
class Grid2 {
public:
    Grid2() = default;
    Grid2(int nx, int ny, T fill = T{})
        : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), fill) {}

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int ix, int iy) { return data_[index(ix, iy)]; }
    const T& operator()(int ix, int iy) const { return data_[index(ix, iy)]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    bool same_shape(const Grid2& other) const noexcept { return nx_ == other.nx_ && ny_ == other.ny_; }

    friend bool operator==(const Grid2&, const Grid2&) = default;

private:
    std::size_t index(int ix, int iy) const noexcept {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(ix);
    }

    int nx_ = 0;
    int ny_ = 0;
    std::vector<T> data_;
};

using Field = Grid2<double>;

struct PixelIndex {
    int ix = 0;
    int iy = 0;
    friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

/// First maximum in scan order.
PixelIndex argmax(const Field& field);

double max_abs(const Field& field);

}  // namespace platefocus
