#include "ro/zipfile.hpp"

#include <zlib.h>

#include <cstdint>

namespace ro::zip {

namespace {

void put16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put32(std::string& out, std::uint32_t v) {
    put16(out, static_cast<std::uint16_t>(v & 0xffff));
    put16(out, static_cast<std::uint16_t>((v >> 16) & 0xffff));
}

std::uint16_t get16(const std::string& in, std::size_t off) {
    if (off + 2 > in.size()) throw ZipError("truncated zip archive");
    return static_cast<std::uint8_t>(in[off]) |
           (static_cast<std::uint16_t>(static_cast<std::uint8_t>(in[off + 1])) << 8);
}

std::uint32_t get32(const std::string& in, std::size_t off) {
    return get16(in, off) | (static_cast<std::uint32_t>(get16(in, off + 2)) << 16);
}

// 2013-01-01 00:00:00 in DOS date/time encoding, for reproducible archives.
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (33 << 9) | (1 << 5) | 1;

std::uint32_t crc_of(const std::string& data) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

}  // namespace

std::string write_zip(const std::vector<std::pair<std::string, std::string>>& entries) {
    std::string out;
    struct Central {
        std::string name;
        std::uint32_t crc, size, offset;
    };
    std::vector<Central> central;

    for (const auto& [name, data] : entries) {
        if (name.empty() || name.size() > 0xffff) throw ZipError("bad entry name");
        if (data.size() > 0xffffffffu) throw ZipError("entry too large");
        std::uint32_t crc = crc_of(data);
        central.push_back({name, crc, static_cast<std::uint32_t>(data.size()),
                           static_cast<std::uint32_t>(out.size())});
        put32(out, 0x04034b50);  // local file header
        put16(out, 20);          // version needed
        put16(out, 0);           // flags
        put16(out, 0);           // method: store
        put16(out, kDosTime);
        put16(out, kDosDate);
        put32(out, crc);
        put32(out, static_cast<std::uint32_t>(data.size()));  // compressed
        put32(out, static_cast<std::uint32_t>(data.size()));  // uncompressed
        put16(out, static_cast<std::uint16_t>(name.size()));
        put16(out, 0);  // extra length
        out += name;
        out += data;
    }

    std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
    for (const auto& c : central) {
        put32(out, 0x02014b50);  // central directory header
        put16(out, 20);          // version made by
        put16(out, 20);          // version needed
        put16(out, 0);
        put16(out, 0);
        put16(out, kDosTime);
        put16(out, kDosDate);
        put32(out, c.crc);
        put32(out, c.size);
        put32(out, c.size);
        put16(out, static_cast<std::uint16_t>(c.name.size()));
        put16(out, 0);  // extra
        put16(out, 0);  // comment
        put16(out, 0);  // disk number
        put16(out, 0);  // internal attrs
        put32(out, 0);  // external attrs
        put32(out, c.offset);
        out += c.name;
    }
    std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_offset;

    put32(out, 0x06054b50);  // end of central directory
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(central.size()));
    put16(out, static_cast<std::uint16_t>(central.size()));
    put32(out, cd_size);
    put32(out, cd_offset);
    put16(out, 0);  // comment length
    return out;
}

std::vector<std::pair<std::string, std::string>> read_zip(const std::string& bytes) {
    // Find the end-of-central-directory record (no comment support needed
    // for our own archives, but scan backwards anyway to be tolerant).
    if (bytes.size() < 22) throw ZipError("not a zip archive");
    std::size_t eocd = std::string::npos;
    for (std::size_t back = 22; back <= bytes.size() && back <= 22 + 0xffff; ++back) {
        std::size_t pos = bytes.size() - back;
        if (get32(bytes, pos) == 0x06054b50) {
            eocd = pos;
            break;
        }
    }
    if (eocd == std::string::npos) throw ZipError("missing end-of-central-directory record");

    std::uint16_t count = get16(bytes, eocd + 10);
    std::size_t pos = get32(bytes, eocd + 16);

    std::vector<std::pair<std::string, std::string>> entries;
    for (std::uint16_t i = 0; i < count; ++i) {
        if (get32(bytes, pos) != 0x02014b50) throw ZipError("bad central directory entry");
        std::uint16_t method = get16(bytes, pos + 10);
        std::uint32_t crc = get32(bytes, pos + 16);
        std::uint32_t size = get32(bytes, pos + 24);
        std::uint16_t name_len = get16(bytes, pos + 28);
        std::uint16_t extra_len = get16(bytes, pos + 30);
        std::uint16_t comment_len = get16(bytes, pos + 32);
        std::uint32_t local_off = get32(bytes, pos + 42);
        if (pos + 46 + name_len > bytes.size()) throw ZipError("truncated zip archive");
        std::string name = bytes.substr(pos + 46, name_len);
        pos += 46u + name_len + extra_len + comment_len;

        if (method != 0) throw ZipError("unsupported compression method for " + name);
        if (get32(bytes, local_off) != 0x04034b50) throw ZipError("bad local header for " + name);
        std::uint16_t l_name = get16(bytes, local_off + 26);
        std::uint16_t l_extra = get16(bytes, local_off + 28);
        std::size_t data_off = local_off + 30u + l_name + l_extra;
        if (data_off + size > bytes.size()) throw ZipError("truncated entry data for " + name);
        std::string data = bytes.substr(data_off, size);
        if (crc_of(data) != crc) throw ZipError("crc mismatch for " + name);
        entries.emplace_back(std::move(name), std::move(data));
    }
    return entries;
}

}  // namespace ro::zip
