#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mapek/error.hpp"

namespace mapek::simnet {

inline constexpr std::uint8_t frame_magic = 0xA5;
inline constexpr std::size_t frame_size = 13;

using FrameBytes = std::array<std::uint8_t, frame_size>;

/// Payload of one device frame, exactly as carried on the wire.
struct FrameReading {
    std::uint16_t device = 0;
    std::uint8_t property = 0;
    float value = 0.0F;
    std::uint32_t tick = 0;

    friend bool operator==(const FrameReading&, const FrameReading&) = default;
};

std::uint8_t frame_checksum(std::span<const std::uint8_t> first_twelve);

/// magic | device BE16 | property | binary32 BE | tick BE32 | XOR of bytes 0..11
FrameBytes encode_frame(const FrameReading& reading);

/// Throws short-frame, long-frame, bad-magic or bad-checksum, checked in that order.
FrameReading decode_frame(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Uppercase or lowercase pairs, no separators. Throws invalid-hex.
std::vector<std::uint8_t> from_hex(std::string_view text);

}  // namespace mapek::simnet
