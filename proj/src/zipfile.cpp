#include "tcforge/zipfile.hpp"

#include "tcforge/errors.hpp"

#include <zlib.h>

#include <cstring>

namespace tcforge {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEocdSig = 0x06054b50;
// 1980-01-01 00:00:00 in DOS date/time encoding.
constexpr std::uint16_t kDosDate = 0x0021;
constexpr std::uint16_t kDosTime = 0x0000;

void put16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put32(std::string& out, std::uint32_t v) {
    put16(out, static_cast<std::uint16_t>(v & 0xffff));
    put16(out, static_cast<std::uint16_t>(v >> 16));
}

std::uint16_t get16(const std::string& data, size_t off) {
    return static_cast<std::uint8_t>(data[off]) |
           (static_cast<std::uint8_t>(data[off + 1]) << 8);
}

std::uint32_t get32(const std::string& data, size_t off) {
    return get16(data, off) | (static_cast<std::uint32_t>(get16(data, off + 2)) << 16);
}

std::uint32_t crc_of(const std::string& bytes) {
    return static_cast<std::uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string inflate_raw(const std::string& compressed, size_t expected_size) {
    std::string out(expected_size, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -15) != Z_OK) throw UnrecognizedLayout("inflate init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
    zs.avail_in = static_cast<uInt>(compressed.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END) throw UnrecognizedLayout("corrupt deflate stream in archive");
    out.resize(out.size() - zs.avail_out);
    return out;
}

} // namespace

std::string write_zip_to_string(const std::vector<ZipEntry>& entries) {
    std::string out;
    std::string central;
    std::uint16_t count = 0;

    for (const auto& entry : entries) {
        if (entry.bytes.size() > 0xfffffffful || entry.name.size() > 0xffff)
            throw Error(ErrorFamily::archive, "zip entry too large: " + entry.name);
        std::uint32_t offset = static_cast<std::uint32_t>(out.size());
        std::uint32_t crc = crc_of(entry.bytes);
        std::uint32_t size = static_cast<std::uint32_t>(entry.bytes.size());

        put32(out, kLocalSig);
        put16(out, 20);   // version needed
        put16(out, 0);    // flags
        put16(out, 0);    // method: stored
        put16(out, kDosTime);
        put16(out, kDosDate);
        put32(out, crc);
        put32(out, size); // compressed
        put32(out, size); // uncompressed
        put16(out, static_cast<std::uint16_t>(entry.name.size()));
        put16(out, 0);    // extra
        out += entry.name;
        out += entry.bytes;

        put32(central, kCentralSig);
        put16(central, 20); // made by
        put16(central, 20); // needed
        put16(central, 0);
        put16(central, 0);
        put16(central, kDosTime);
        put16(central, kDosDate);
        put32(central, crc);
        put32(central, size);
        put32(central, size);
        put16(central, static_cast<std::uint16_t>(entry.name.size()));
        put16(central, 0); // extra
        put16(central, 0); // comment
        put16(central, 0); // disk
        put16(central, 0); // internal attrs
        put32(central, 0); // external attrs
        put32(central, offset);
        central += entry.name;
        count++;
    }

    std::uint32_t central_offset = static_cast<std::uint32_t>(out.size());
    out += central;
    put32(out, kEocdSig);
    put16(out, 0);
    put16(out, 0);
    put16(out, count);
    put16(out, count);
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, central_offset);
    put16(out, 0);
    return out;
}

void write_zip(const fs::path& dest, const std::vector<ZipEntry>& entries) {
    write_file(dest, write_zip_to_string(entries));
}

std::vector<ZipEntry> read_zip_from_string(const std::string& data) {
    if (data.size() < 22) throw UnrecognizedLayout("file too small to be a zip archive");

    size_t eocd = std::string::npos;
    size_t scan_start = data.size() >= 66000 ? data.size() - 66000 : 0;
    for (size_t i = data.size() - 22 + 1; i-- > scan_start;) {
        if (get32(data, i) == kEocdSig) {
            eocd = i;
            break;
        }
    }
    if (eocd == std::string::npos) throw UnrecognizedLayout("zip end-of-directory not found");

    std::uint16_t count = get16(data, eocd + 10);
    std::uint32_t central_offset = get32(data, eocd + 16);

    std::vector<ZipEntry> entries;
    size_t pos = central_offset;
    for (int i = 0; i < count; i++) {
        if (pos + 46 > data.size() || get32(data, pos) != kCentralSig)
            throw UnrecognizedLayout("corrupt zip central directory");
        std::uint16_t method = get16(data, pos + 10);
        std::uint32_t crc = get32(data, pos + 16);
        std::uint32_t csize = get32(data, pos + 20);
        std::uint32_t usize = get32(data, pos + 24);
        std::uint16_t name_len = get16(data, pos + 28);
        std::uint16_t extra_len = get16(data, pos + 30);
        std::uint16_t comment_len = get16(data, pos + 32);
        std::uint32_t local_offset = get32(data, pos + 42);
        std::string name = data.substr(pos + 46, name_len);
        pos += 46 + name_len + extra_len + comment_len;

        if (local_offset + 30 > data.size() || get32(data, local_offset) != kLocalSig)
            throw UnrecognizedLayout("corrupt zip local header for " + name);
        std::uint16_t local_name_len = get16(data, local_offset + 26);
        std::uint16_t local_extra_len = get16(data, local_offset + 28);
        size_t data_start = local_offset + 30 + local_name_len + local_extra_len;
        if (data_start + csize > data.size())
            throw UnrecognizedLayout("zip entry data out of range for " + name);

        std::string raw = data.substr(data_start, csize);
        ZipEntry entry;
        entry.name = std::move(name);
        if (method == 0)
            entry.bytes = std::move(raw);
        else if (method == 8)
            entry.bytes = inflate_raw(raw, usize);
        else
            throw UnrecognizedLayout("unsupported zip compression method " +
                                     std::to_string(method));
        if (crc_of(entry.bytes) != crc)
            throw UnrecognizedLayout("crc mismatch for zip entry " + entry.name);
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<ZipEntry> read_zip(const fs::path& src) { return read_zip_from_string(read_file(src)); }

bool looks_like_zip(const fs::path& path) {
    if (!fs::is_regular_file(path)) return false;
    std::string head = read_file(path).substr(0, 4);
    return head.size() == 4 && head[0] == 'P' && head[1] == 'K' && head[2] == 3 && head[3] == 4;
}

} // namespace tcforge
