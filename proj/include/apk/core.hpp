#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace apk {

/// Largest physical-space dimension a Point can carry.
inline constexpr std::size_t kMaxDim = 4;

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    HardcoreMismatch,
    RegionOutsideWindow,
    TranslationExceedsWindow,
    WindowTooSmall,
    RadiusExceedsWindow,
    OutsideWindow,
    EmptyCandidateSet,
    SupportTooLarge,
    PsiNotNormalized,
    NoAtomAtZero,
    SingularBasis,
    NotUniformlyDiscrete,
    ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this exception.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Point of R^n, n <= kMaxDim, stored inline.
class Point {
public:
    Point() = default;
    explicit Point(std::size_t dim);
    Point(std::initializer_list<double> coords);

    static Point from(std::span<const double> coords);
    static Point zero(std::size_t dim) { return Point(dim); }

    std::size_t dim() const noexcept { return dim_; }
    double operator[](std::size_t i) const noexcept { return c_[i]; }
    double& operator[](std::size_t i) noexcept { return c_[i]; }
    std::span<const double> coords() const noexcept { return {c_.data(), dim_}; }

    double norm2() const noexcept;
    double norm() const noexcept { return std::sqrt(norm2()); }
    bool finite() const noexcept;

    Point& operator+=(const Point& o) noexcept;
    Point& operator-=(const Point& o) noexcept;
    Point& operator*=(double s) noexcept;

    friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
    friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
    friend Point operator*(Point a, double s) noexcept { return a *= s; }
    friend Point operator*(double s, Point a) noexcept { return a *= s; }
    friend Point operator-(Point a) noexcept { return a *= -1.0; }

    friend bool operator==(const Point& a, const Point& b) noexcept;
    /// Lexicographic order on coordinates (dimension first).
    friend std::weak_ordering operator<=>(const Point& a, const Point& b) noexcept;

private:
    std::array<double, kMaxDim> c_{};
    std::uint8_t dim_ = 0;
};

inline double distance2(const Point& a, const Point& b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(const Point& a, const Point& b) noexcept { return std::sqrt(distance2(a, b)); }

std::string to_string(const Point& p);

} // namespace apk
