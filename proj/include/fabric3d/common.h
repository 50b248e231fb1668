#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fabric3d {

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Raised by every text reader; line/col are 1-based, 0 when unknown.
class ParseError : public Error
{
  public:
    ParseError(const std::string &what, int line = 0, int col = 0);
    int line() const { return line_; }
    int col() const { return col_; }

  private:
    int line_;
    int col_;
};

// Portable random source. std::uniform_*_distribution differ between standard
// libraries, so bounded draws are done here to keep seeded runs reproducible.
class Rng
{
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }
    // Unbiased integer in [0, n). n must be > 0.
    uint64_t below(uint64_t n);
    int below(int n) { return static_cast<int>(below(static_cast<uint64_t>(n))); }
    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    template <typename T> void shuffle(std::vector<T> &v)
    {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = below(static_cast<uint64_t>(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(uint64_t v);

std::string read_file(const std::string &path);
void write_file(const std::string &path, std::string_view data);

// Splits on runs of whitespace.
std::vector<std::string> split_ws(std::string_view s);
std::string_view trim(std::string_view s);

} // namespace fabric3d
