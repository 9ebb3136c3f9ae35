#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "platefocus/pattern.hpp"
#include "platefocus/plate.hpp"

namespace platefocus {

inline constexpr std::uint32_t kLinkSampleRate = 10000;
inline constexpr std::uint8_t kLinkChannels = 5;
inline constexpr std::uint8_t kLinkSamplesPerChannel = 25;
inline constexpr std::uint8_t kPacketVersion = 1;
inline constexpr std::size_t kPacketHeaderBytes = 24;
inline constexpr std::size_t kPacketCrcBytes = 4;
/// Drive units represented by an i16 sample of 32767.
inline constexpr double kDriveFullScale = kGainMax;

/// Quantized drive waveform for one channel.
struct WaveSamples {
    std::vector<std::int16_t> samples;
    double sample_rate = kLinkSampleRate;
    double full_scale = kDriveFullScale;

    std::size_t length() const noexcept { return samples.size(); }
    double value(std::size_t i) const noexcept { return samples[i] * full_scale / 32767.0; }
};

std::int16_t quantize_drive(double value, double full_scale = kDriveFullScale) noexcept;

/// Ideal (unquantized) waveform value at `turns` = f t + phase/360:
/// sine sin(2 pi p); square +1 for the first `duty` of the period, else -1;
/// triangle rises 0 -> 1 -> -1 -> 0 like a sine; ramp rises from -1 to +1 over
/// `duty` of the period and falls back over the rest (duty 1 is a sawtooth).
double wave_value(WaveShape shape, double turns, double duty) noexcept;

WaveSamples synth_wave(WaveShape shape, double frequency, double amplitude, double phase_deg, double duty,
                       double sample_rate, std::size_t n, double full_scale = kDriveFullScale);

/// Fundamental amplitude (drive units) and phase (degrees, sine reference) of
/// a window covering an integer number of periods of `frequency`.
struct ChannelPhasor {
    double amplitude = 0.0;
    double phase_deg = 0.0;
};

ChannelPhasor extract_channel_phasor(const WaveSamples& samples, double frequency);

/// Wire format, all integers little-endian:
///   0  magic "VPB1"      4  version u8   5 flags u8   6 channel_count u8
///   7  samples/chan u8   8  seq u32     12 sample_rate_hz u32
///   16 timestamp_us u64  24 payload i16[channel][sample]   .. crc32 u32
struct DrivePacket {
    std::uint8_t version = kPacketVersion;
    std::uint8_t flags = 0;
    std::uint8_t channel_count = kLinkChannels;
    std::uint8_t samples_per_channel = kLinkSamplesPerChannel;
    std::uint32_t seq = 0;
    std::uint32_t sample_rate_hz = kLinkSampleRate;
    std::uint64_t timestamp_us = 0;
    std::vector<std::int16_t> payload;

    std::size_t wire_size() const noexcept {
        return kPacketHeaderBytes + 2u * channel_count * samples_per_channel + kPacketCrcBytes;
    }
    std::int16_t sample(std::size_t channel, std::size_t i) const { return payload[channel * samples_per_channel + i]; }

    friend bool operator==(const DrivePacket&, const DrivePacket&) = default;
};

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) noexcept;

std::vector<std::uint8_t> encode_packet(const DrivePacket& packet);
/// Throws Truncated, BadMagic, BadVersion or BadCrc.
DrivePacket decode_packet(std::span<const std::uint8_t> bytes);

/// Packet k of a drive stream: samples k*25 .. k*25+24 of every channel,
/// timestamp k * 2500 us.
DrivePacket make_drive_packet(const ActuatorPhasor& phasors, double frequency, std::uint32_t seq,
                              double full_scale = kDriveFullScale);

/// Least-squares fit of a*sin + b*cos at a fixed frequency over samples with
/// known absolute indices. On complete integer-period windows this is the
/// single-bin DFT; missing samples leave a pure tone's estimate unbiased.
class PhasorAccumulator {
public:
    PhasorAccumulator(double frequency, double sample_rate) : frequency_(frequency), sample_rate_(sample_rate) {}

    void add(std::uint64_t sample_index, double value) noexcept;
    ChannelPhasor estimate() const noexcept;
    std::size_t count() const noexcept { return count_; }

private:
    double frequency_;
    double sample_rate_;
    double ss_ = 0, cc_ = 0, sc_ = 0, vs_ = 0, vc_ = 0;
    std::size_t count_ = 0;
};

struct ReassemblyStats {
    std::uint64_t delivered = 0;
    std::uint64_t late_dropped = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t gaps = 0;
    std::uint64_t overflow_flushes = 0;
};

/// Bounded in-order reassembly keyed by seq. Packets older than the next
/// expected seq are dropped as late; when more than `capacity` packets wait,
/// the oldest is released and the skipped seqs are counted as gaps.
class ReassemblyBuffer {
public:
    explicit ReassemblyBuffer(std::size_t capacity = 64) : capacity_(capacity) {}

    /// Returns packets that became deliverable, in seq order.
    std::vector<DrivePacket> push(DrivePacket packet);
    std::vector<DrivePacket> flush();

    const ReassemblyStats& stats() const noexcept { return stats_; }

private:
    void release(std::vector<DrivePacket>& out);

    std::size_t capacity_;
    bool started_ = false;
    std::uint32_t next_seq_ = 0;
    std::map<std::uint32_t, DrivePacket> pending_;
    ReassemblyStats stats_;
};

/// Largest scale in (0, 1] that brings every amplitude within full_scale; the
/// energy image of the scaled drive differs only by that factor.
double drive_scale_for(const ActuatorPhasor& phasors, double full_scale = kDriveFullScale) noexcept;
ActuatorPhasor scale_phasors(const ActuatorPhasor& phasors, double scale) noexcept;

/// What the plate displays under the received drive.
EnergyImage board_sim(const ActuatorPhasor& received, const ResponseCache& cache);

}  // namespace platefocus
