#include "apk/core.hpp"
#include "apk/numeric.hpp"

#include <numbers>
#include <sstream>

namespace apk {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::HardcoreMismatch: return "HardcoreMismatch";
    case ErrorCode::RegionOutsideWindow: return "RegionOutsideWindow";
    case ErrorCode::TranslationExceedsWindow: return "TranslationExceedsWindow";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::RadiusExceedsWindow: return "RadiusExceedsWindow";
    case ErrorCode::OutsideWindow: return "OutsideWindow";
    case ErrorCode::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::PsiNotNormalized: return "PsiNotNormalized";
    case ErrorCode::NoAtomAtZero: return "NoAtomAtZero";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::NotUniformlyDiscrete: return "NotUniformlyDiscrete";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

Point::Point(std::size_t dim) {
    if (dim > kMaxDim) throw Error(ErrorCode::InvalidArgument, "point dimension exceeds kMaxDim");
    dim_ = static_cast<std::uint8_t>(dim);
}

Point::Point(std::initializer_list<double> coords) : Point(coords.size()) {
    std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::from(std::span<const double> coords) {
    Point p(coords.size());
    std::copy(coords.begin(), coords.end(), p.c_.begin());
    return p;
}

double Point::norm2() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += c_[i] * c_[i];
    return s;
}

bool Point::finite() const noexcept {
    for (std::size_t i = 0; i < dim_; ++i)
        if (!std::isfinite(c_[i])) return false;
    return true;
}

Point& Point::operator+=(const Point& o) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
}

Point& Point::operator-=(const Point& o) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
}

Point& Point::operator*=(double s) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
}

bool operator==(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t i = 0; i < a.dim_; ++i)
        if (a.c_[i] != b.c_[i]) return false;
    return true;
}

std::weak_ordering operator<=>(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return a.dim_ <=> b.dim_;
    for (std::size_t i = 0; i < a.dim_; ++i) {
        if (a.c_[i] < b.c_[i]) return std::weak_ordering::less;
        if (a.c_[i] > b.c_[i]) return std::weak_ordering::greater;
    }
    return std::weak_ordering::equivalent;
}

std::string to_string(const Point& p) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t i = 0; i < p.dim(); ++i) os << (i ? ", " : "") << p[i];
    os << ')';
    return os.str();
}

double ball_volume(std::size_t n, double R) {
    if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
    if (n == 1) return 2.0 * R;
    if (n == 2) return std::numbers::pi * R * R;
    const double half = static_cast<double>(n) / 2.0;
    return std::pow(std::numbers::pi, half) * std::pow(R, static_cast<double>(n)) / std::tgamma(half + 1.0);
}

TailSummary tail_summary(std::span<const double> values, double fraction) {
    TailSummary t;
    if (values.empty()) return t;
    auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(values.size())));
    count = std::clamp<std::size_t>(count, 1, values.size());
    const auto tail = values.last(count);
    t.max = *std::max_element(tail.begin(), tail.end());
    t.min = *std::min_element(tail.begin(), tail.end());
    t.mean = pairwise_sum(tail) / static_cast<double>(count);
    t.relative_spread = t.max > 0.0 ? (t.max - t.min) / t.max : 0.0;
    return t;
}

} // namespace apk
