#include <zlib.h>

#include <cstring>
#include <fstream>

#include "morphgen/diag.hpp"
#include "morphgen/render.hpp"

namespace morphgen {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back((v >> 24) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back(v & 0xff);
}

void put_chunk(std::vector<uint8_t>& out, const char type[4],
               const std::vector<uint8_t>& data) {
    put_u32(out, (uint32_t)data.size());
    size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uint32_t crc = crc32(0, out.data() + start, (uInt)(out.size() - start));
    put_u32(out, crc);
}

}  // namespace

std::vector<uint8_t> png_bytes(const FrameImage& img) {
    // scanlines with filter byte 0
    std::vector<uint8_t> raw((size_t)img.h * (1 + (size_t)img.w * 3));
    for (int y = 0; y < img.h; y++) {
        uint8_t* row = raw.data() + (size_t)y * (1 + (size_t)img.w * 3);
        row[0] = 0;
        std::memcpy(row + 1, img.rgb.data() + (size_t)y * img.w * 3, (size_t)img.w * 3);
    }
    uLongf zcap = compressBound((uLong)raw.size());
    std::vector<uint8_t> z(zcap);
    if (compress2(z.data(), &zcap, raw.data(), (uLong)raw.size(), 6) != Z_OK)
        throw UsageError("IoError: deflate failed");
    z.resize(zcap);

    std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    std::vector<uint8_t> ihdr;
    put_u32(ihdr, (uint32_t)img.w);
    put_u32(ihdr, (uint32_t)img.h);
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // truecolor
    ihdr.push_back(0);   // deflate
    ihdr.push_back(0);   // filter method
    ihdr.push_back(0);   // no interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", z);
    put_chunk(out, "IEND", {});
    return out;
}

void write_png(const FrameImage& img, const std::string& path) {
    std::vector<uint8_t> bytes = png_bytes(img);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("IoError: cannot write '" + path + "'");
    f.write(reinterpret_cast<const char*>(bytes.data()), (std::streamsize)bytes.size());
    if (!f) throw UsageError("IoError: short write to '" + path + "'");
}

}  // namespace morphgen
