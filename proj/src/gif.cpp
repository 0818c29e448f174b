#include <array>
#include <fstream>

#include "awnet/data/image.hpp"

namespace awnet {

namespace {

struct ByteReader {
    const std::vector<std::uint8_t>& b;
    std::size_t pos = 0;
    std::uint8_t u8() {
        if (pos >= b.size()) throw DataError("gif: unexpected end of file");
        return b[pos++];
    }
    int u16() {
        const int lo = u8(), hi = u8();
        return lo | (hi << 8);
    }
    void skip(std::size_t n) {
        if (pos + n > b.size()) throw DataError("gif: unexpected end of file");
        pos += n;
    }
};

void skip_sub_blocks(ByteReader& r) {
    for (;;) {
        const std::uint8_t len = r.u8();
        if (len == 0) return;
        r.skip(len);
    }
}

std::vector<std::uint8_t> read_sub_blocks(ByteReader& r) {
    std::vector<std::uint8_t> out;
    for (;;) {
        const std::uint8_t len = r.u8();
        if (len == 0) return out;
        for (int i = 0; i < len; ++i) out.push_back(r.u8());
    }
}

std::vector<std::uint8_t> lzw_decode(const std::vector<std::uint8_t>& data, int min_code_size,
                                     std::size_t expected_pixels) {
    const int clear_code = 1 << min_code_size;
    const int eoi_code = clear_code + 1;

    std::vector<std::vector<std::uint8_t>> dict;
    auto reset_dict = [&] {
        dict.clear();
        dict.reserve(4096);
        for (int i = 0; i < clear_code; ++i) dict.push_back({static_cast<std::uint8_t>(i)});
        dict.push_back({});  // clear
        dict.push_back({});  // eoi
    };
    reset_dict();

    std::vector<std::uint8_t> out;
    out.reserve(expected_pixels);

    int code_size = min_code_size + 1;
    std::size_t bitpos = 0;
    int prev = -1;
    auto read_code = [&]() -> int {
        int code = 0;
        for (int i = 0; i < code_size; ++i) {
            const std::size_t byte = (bitpos + i) >> 3;
            if (byte >= data.size()) return -1;
            code |= ((data[byte] >> ((bitpos + i) & 7)) & 1) << i;
        }
        bitpos += code_size;
        return code;
    };

    for (;;) {
        const int code = read_code();
        if (code < 0) break;  // ran out of bits; treat as end
        if (code == clear_code) {
            reset_dict();
            code_size = min_code_size + 1;
            prev = -1;
            continue;
        }
        if (code == eoi_code) break;
        std::vector<std::uint8_t> entry;
        if (prev < 0) {
            if (code >= static_cast<int>(dict.size())) throw DataError("gif: bad initial LZW code");
            entry = dict[code];
        } else if (code < static_cast<int>(dict.size())) {
            entry = dict[code];
        } else if (code == static_cast<int>(dict.size())) {
            entry = dict[prev];
            entry.push_back(dict[prev].front());
        } else {
            throw DataError("gif: LZW code out of range");
        }
        out.insert(out.end(), entry.begin(), entry.end());
        if (prev >= 0 && dict.size() < 4096) {
            std::vector<std::uint8_t> next = dict[prev];
            next.push_back(entry.front());
            dict.push_back(std::move(next));
            if (dict.size() == (1u << code_size) && code_size < 12) ++code_size;
        }
        prev = code;
        if (out.size() >= expected_pixels) break;
    }
    if (out.size() < expected_pixels)
        throw DataError("gif: decoded pixel count " + std::to_string(out.size()) + " short of " +
                        std::to_string(expected_pixels));
    out.resize(expected_pixels);
    return out;
}

}  // namespace

ImageU8 decode_gif(const std::vector<std::uint8_t>& bytes) {
    ByteReader r{bytes};
    if (bytes.size() < 13) throw DataError("gif: file too small");
    if (!(bytes[0] == 'G' && bytes[1] == 'I' && bytes[2] == 'F' && bytes[3] == '8' &&
          (bytes[4] == '7' || bytes[4] == '9') && bytes[5] == 'a'))
        throw DataError("gif: bad signature");
    r.pos = 6;
    const int screen_w = r.u16();
    const int screen_h = r.u16();
    const std::uint8_t packed = r.u8();
    r.skip(2);  // background index, aspect ratio

    std::vector<std::array<std::uint8_t, 3>> global_palette;
    if (packed & 0x80) {
        const int n = 2 << (packed & 0x07);
        global_palette.resize(n);
        for (auto& e : global_palette) {
            e[0] = r.u8();
            e[1] = r.u8();
            e[2] = r.u8();
        }
    }

    for (;;) {
        const std::uint8_t block = r.u8();
        if (block == 0x3B) throw DataError("gif: no image data before trailer");
        if (block == 0x21) {  // extension
            r.u8();           // label
            skip_sub_blocks(r);
            continue;
        }
        if (block != 0x2C) throw DataError("gif: unknown block type");

        const int left = r.u16();
        const int top = r.u16();
        const int img_w = r.u16();
        const int img_h = r.u16();
        const std::uint8_t ipacked = r.u8();
        std::vector<std::array<std::uint8_t, 3>> palette = global_palette;
        if (ipacked & 0x80) {
            const int n = 2 << (ipacked & 0x07);
            palette.assign(n, {});
            for (auto& e : palette) {
                e[0] = r.u8();
                e[1] = r.u8();
                e[2] = r.u8();
            }
        }
        if (palette.empty()) throw DataError("gif: no colour table");
        const bool interlaced = (ipacked & 0x40) != 0;

        const int min_code_size = r.u8();
        if (min_code_size < 2 || min_code_size > 11) throw DataError("gif: bad LZW minimum code size");
        const auto data = read_sub_blocks(r);
        const auto indices = lzw_decode(data, min_code_size, static_cast<std::size_t>(img_w) * img_h);

        ImageU8 out(screen_h, screen_w, 3);
        auto put_row = [&](int src_row, int dst_row) {
            for (int x = 0; x < img_w; ++x) {
                const std::uint8_t idx = indices[static_cast<std::size_t>(src_row) * img_w + x];
                if (idx >= palette.size()) throw DataError("gif: palette index out of range");
                const int yy = top + dst_row, xx = left + x;
                if (yy < 0 || yy >= screen_h || xx < 0 || xx >= screen_w) continue;
                out.at(yy, xx, 0) = palette[idx][0];
                out.at(yy, xx, 1) = palette[idx][1];
                out.at(yy, xx, 2) = palette[idx][2];
            }
        };
        if (!interlaced) {
            for (int y = 0; y < img_h; ++y) put_row(y, y);
        } else {
            static constexpr int starts[4] = {0, 4, 2, 1};
            static constexpr int steps[4] = {8, 8, 4, 2};
            int src = 0;
            for (int pass = 0; pass < 4; ++pass)
                for (int y = starts[pass]; y < img_h; y += steps[pass]) put_row(src++, y);
        }
        return out;  // first frame only
    }
}

ImageU8 read_gif(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_gif(bytes);
}

}  // namespace awnet
