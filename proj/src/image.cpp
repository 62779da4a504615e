#include "tubal/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "tubal/errors.hpp"

namespace tubal {

namespace {

// Incremental PPM header tokenizer that remembers its byte offset, so parse
// errors can point at the exact spot.
struct HeaderScanner {
    const std::vector<unsigned char>& buf;
    const std::string& path;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(path + ": " + msg, pos); }

    void skip_space_and_comments() {
        while (pos < buf.size()) {
            if (std::isspace(buf[pos])) {
                ++pos;
            } else if (buf[pos] == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else {
                return;
            }
        }
    }

    long parse_number(const char* what) {
        skip_space_and_comments();
        if (pos >= buf.size() || !std::isdigit(buf[pos]))
            fail(std::string("expected ") + what);
        long v = 0;
        while (pos < buf.size() && std::isdigit(buf[pos])) {
            v = v * 10 + (buf[pos] - '0');
            if (v > 1 << 30) fail(std::string(what) + " out of range");
            ++pos;
        }
        return v;
    }
};

}  // namespace

ImageTensor load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

    HeaderScanner scan{buf, path};
    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '6')
        scan.fail("not a binary PPM (expected magic P6)");
    scan.pos = 2;

    const long width = scan.parse_number("width");
    const long height = scan.parse_number("height");
    const long maxval = scan.parse_number("maxval");
    if (width < 1 || height < 1) scan.fail("image dimensions must be positive");
    if (maxval != 255) scan.fail("unsupported maxval " + std::to_string(maxval) + ", need 255");

    // Exactly one whitespace byte separates the header from the payload.
    if (scan.pos >= buf.size() || !std::isspace(buf[scan.pos]))
        scan.fail("expected single whitespace before pixel data");
    ++scan.pos;

    const std::size_t need = static_cast<std::size_t>(width) * height * 3;
    if (buf.size() - scan.pos < need) {
        scan.pos = buf.size();
        throw ParseError(path + ": pixel payload truncated (need " + std::to_string(need) +
                             " bytes)",
                         buf.size());
    }

    ImageTensor img;
    img.tensor = Tensor3d(height, width, 3);
    const unsigned char* p = buf.data() + scan.pos;
    for (long i = 0; i < height; ++i)
        for (long j = 0; j < width; ++j)
            for (long k = 0; k < 3; ++k)
                img.tensor(i, j, k) = static_cast<double>(p[3 * (i * width + j) + k]) / 255.0;
    img.provenance = path;
    return img;
}

void save_image(const ImageTensor& img, const std::string& path) {
    const Index n1 = img.tensor.n1(), n2 = img.tensor.n2(), n3 = img.tensor.n3();
    if (n3 != 3)
        throw ArgumentError("save_image: image tensor must have 3 channels, got " +
                            std::to_string(n3));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "P6\n" << n2 << " " << n1 << "\n255\n";

    std::vector<unsigned char> payload(static_cast<std::size_t>(n1) * n2 * 3);
    for (Index i = 0; i < n1; ++i)
        for (Index j = 0; j < n2; ++j)
            for (Index k = 0; k < 3; ++k) {
                const double v = std::clamp(img.tensor(i, j, k), 0.0, 1.0);
                payload[3 * (i * n2 + j) + k] =
                    static_cast<unsigned char>(std::lround(v * 255.0));
            }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace tubal
