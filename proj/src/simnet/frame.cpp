#include "mapek/simnet/frame.hpp"

#include <bit>

namespace mapek::simnet {

std::uint8_t frame_checksum(std::span<const std::uint8_t> first_twelve) {
    std::uint8_t x = 0;
    for (auto b : first_twelve) x ^= b;
    return x;
}

namespace {

void put_be(FrameBytes& out, std::size_t at, std::uint32_t value, int width) {
    for (int i = 0; i < width; ++i) {
        out[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value >> (8 * (width - 1 - i)));
    }
}

std::uint32_t get_be(std::span<const std::uint8_t> in, std::size_t at, int width) {
    std::uint32_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 8) | in[at + static_cast<std::size_t>(i)];
    return v;
}

}  // namespace

FrameBytes encode_frame(const FrameReading& reading) {
    FrameBytes out{};
    out[0] = frame_magic;
    put_be(out, 1, reading.device, 2);
    out[3] = reading.property;
    put_be(out, 4, std::bit_cast<std::uint32_t>(reading.value), 4);
    put_be(out, 8, reading.tick, 4);
    out[12] = frame_checksum(std::span(out).first(12));
    return out;
}

FrameReading decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < frame_size) {
        throw Error("short-frame", "frame has " + std::to_string(bytes.size()) + " bytes, expected 13");
    }
    if (bytes.size() > frame_size) {
        throw Error("long-frame", "frame has " + std::to_string(bytes.size()) + " bytes, expected 13");
    }
    if (bytes[0] != frame_magic) throw Error("bad-magic", "first byte is not 0xA5");
    if (frame_checksum(bytes.first(12)) != bytes[12]) throw Error("bad-checksum", "checksum mismatch");
    FrameReading r;
    r.device = static_cast<std::uint16_t>(get_be(bytes, 1, 2));
    r.property = bytes[3];
    r.value = std::bit_cast<float>(get_be(bytes, 4, 4));
    r.tick = get_be(bytes, 8, 4);
    return r;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0x0F];
    }
    return out;
}

std::vector<std::uint8_t> from_hex(std::string_view text) {
    auto nibble = [&](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw Error("invalid-hex", "'" + std::string(text) + "' is not a hex byte string");
    };
    if (text.size() % 2 != 0) throw Error("invalid-hex", "odd number of hex digits");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < text.size(); i += 2) {
        out.push_back(static_cast<std::uint8_t>((nibble(text[i]) << 4) | nibble(text[i + 1])));
    }
    return out;
}

}  // namespace mapek::simnet
