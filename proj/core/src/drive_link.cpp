#include "platefocus/drive_link.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "platefocus/errors.hpp"

namespace platefocus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double v) noexcept { return v - std::floor(v); }

double normalize_degrees(double deg) noexcept {
    double d = std::fmod(deg, 360.0);
    if (d < 0) d += 360.0;
    return d >= 360.0 ? 0.0 : d;
}

ChannelPhasor polar_from_sin_cos(double a, double b) noexcept {
    ChannelPhasor p;
    p.amplitude = std::hypot(a, b);
    p.phase_deg = p.amplitude == 0.0 ? 0.0 : normalize_degrees(std::atan2(b, a) * 180.0 / std::numbers::pi);
    return p;
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xFFu));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u = static_cast<U>(u | (static_cast<U>(in[offset + i]) << (8 * i)));
    return static_cast<T>(u);
}

constexpr std::array<std::uint8_t, 4> kMagic{'V', 'P', 'B', '1'};

}  // namespace

std::int16_t quantize_drive(double value, double full_scale) noexcept {
    const double q = std::round(value / full_scale * 32767.0);
    return static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0));
}

double wave_value(WaveShape shape, double turns, double duty) noexcept {
    const double p = frac(turns);
    switch (shape) {
        case WaveShape::sine:
            return p == 0.0 ? 0.0 : std::sin(kTwoPi * p);
        case WaveShape::square:
            return p < duty ? 1.0 : -1.0;
        case WaveShape::triangle:
            if (p < 0.25) return 4.0 * p;
            if (p < 0.75) return 2.0 - 4.0 * p;
            return 4.0 * p - 4.0;
        case WaveShape::ramp:
            if (duty >= 1.0) return -1.0 + 2.0 * p;
            if (duty <= 0.0) return 1.0 - 2.0 * p;
            return p < duty ? -1.0 + 2.0 * p / duty : 1.0 - 2.0 * (p - duty) / (1.0 - duty);
    }
    return 0.0;
}

WaveSamples synth_wave(WaveShape shape, double frequency, double amplitude, double phase_deg, double duty,
                       double sample_rate, std::size_t n, double full_scale) {
    if (!(frequency > 0.0) || !std::isfinite(frequency)) throw Error(ErrorKind::InvalidSpec, "frequency must be positive");
    if (!(amplitude >= 0.0)) throw Error(ErrorKind::InvalidSpec, "amplitude must be non-negative");
    if (!(duty > 0.0 && duty < 1.0)) throw Error(ErrorKind::InvalidDuty, "duty must lie strictly between 0 and 1");
    if (!(sample_rate > 2.0 * frequency)) throw Error(ErrorKind::SampleRateTooLow, "sample rate must exceed twice the frequency");
    if (n < 1) throw Error(ErrorKind::InvalidSpec, "need at least one sample");

    WaveSamples w;
    w.sample_rate = sample_rate;
    w.full_scale = full_scale;
    w.samples.resize(n);
    const double phase_turns = normalize_degrees(phase_deg) / 360.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double turns = frac(frequency * static_cast<double>(i) / sample_rate) + phase_turns;
        w.samples[i] = quantize_drive(amplitude * wave_value(shape, turns, duty), full_scale);
    }
    return w;
}

ChannelPhasor extract_channel_phasor(const WaveSamples& samples, double frequency) {
    const std::size_t n = samples.length();
    if (!(frequency > 0.0)) throw Error(ErrorKind::InvalidSpec, "frequency must be positive");
    const double periods = static_cast<double>(n) * frequency / samples.sample_rate;
    const double whole = std::round(periods);
    if (whole < 1.0 || std::abs(periods - whole) > 1e-9 * std::max(1.0, periods))
        throw Error(ErrorKind::WindowNotIntegerPeriods, "window must cover a whole number (>= 1) of periods");

    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = kTwoPi * frac(frequency * static_cast<double>(i) / samples.sample_rate);
        const double v = samples.value(i);
        a += v * std::sin(theta);
        b += v * std::cos(theta);
    }
    const double norm = 2.0 / static_cast<double>(n);
    return polar_from_sin_cos(a * norm, b * norm);
}

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) noexcept {
    return static_cast<std::uint32_t>(::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

std::vector<std::uint8_t> encode_packet(const DrivePacket& packet) {
    if (packet.payload.size() != static_cast<std::size_t>(packet.channel_count) * packet.samples_per_channel)
        throw Error(ErrorKind::InvalidSpec, "payload size does not match channel_count * samples_per_channel");
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.reserve(packet.wire_size());
    out.push_back(packet.version);
    out.push_back(packet.flags);
    out.push_back(packet.channel_count);
    out.push_back(packet.samples_per_channel);
    put_le(out, packet.seq);
    put_le(out, packet.sample_rate_hz);
    put_le(out, packet.timestamp_us);
    for (std::int16_t s : packet.payload) put_le(out, s);
    put_le(out, crc32_ieee(out));
    return out;
}

DrivePacket decode_packet(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kPacketHeaderBytes + kPacketCrcBytes) throw Error(ErrorKind::Truncated, "datagram shorter than header");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw Error(ErrorKind::BadMagic, "magic is not VPB1");
    DrivePacket p;
    p.version = bytes[4];
    if (p.version != kPacketVersion) throw Error(ErrorKind::BadVersion, "unsupported version " + std::to_string(p.version));
    p.flags = bytes[5];
    p.channel_count = bytes[6];
    p.samples_per_channel = bytes[7];
    if (bytes.size() != p.wire_size())
        throw Error(ErrorKind::Truncated, "datagram length " + std::to_string(bytes.size()) + " != expected " +
                                              std::to_string(p.wire_size()));
    const std::size_t body = bytes.size() - kPacketCrcBytes;
    if (crc32_ieee(bytes.first(body)) != get_le<std::uint32_t>(bytes, body)) throw Error(ErrorKind::BadCrc, "CRC mismatch");
    p.seq = get_le<std::uint32_t>(bytes, 8);
    p.sample_rate_hz = get_le<std::uint32_t>(bytes, 12);
    p.timestamp_us = get_le<std::uint64_t>(bytes, 16);
    p.payload.resize(static_cast<std::size_t>(p.channel_count) * p.samples_per_channel);
    for (std::size_t i = 0; i < p.payload.size(); ++i) p.payload[i] = get_le<std::int16_t>(bytes, kPacketHeaderBytes + 2 * i);
    return p;
}

DrivePacket make_drive_packet(const ActuatorPhasor& phasors, double frequency, std::uint32_t seq, double full_scale) {
    DrivePacket p;
    p.seq = seq;
    p.timestamp_us = static_cast<std::uint64_t>(seq) * kLinkSamplesPerChannel * 1000000u / kLinkSampleRate;
    p.payload.resize(static_cast<std::size_t>(kLinkChannels) * kLinkSamplesPerChannel);
    const std::uint64_t first = static_cast<std::uint64_t>(seq) * kLinkSamplesPerChannel;
    for (std::size_t c = 0; c < kLinkChannels; ++c) {
        const double phase_turns = normalize_degrees(phasors.phase_deg[c]) / 360.0;
        for (std::size_t s = 0; s < kLinkSamplesPerChannel; ++s) {
            const double turns = frac(frequency * static_cast<double>(first + s) / kLinkSampleRate) + phase_turns;
            p.payload[c * kLinkSamplesPerChannel + s] =
                quantize_drive(phasors.amplitude[c] * wave_value(WaveShape::sine, turns, 0.5), full_scale);
        }
    }
    return p;
}

void PhasorAccumulator::add(std::uint64_t sample_index, double value) noexcept {
    const double theta = kTwoPi * frac(frequency_ * static_cast<double>(sample_index) / sample_rate_);
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    ss_ += s * s;
    cc_ += c * c;
    sc_ += s * c;
    vs_ += value * s;
    vc_ += value * c;
    ++count_;
}

ChannelPhasor PhasorAccumulator::estimate() const noexcept {
    const double det = ss_ * cc_ - sc_ * sc_;
    if (count_ == 0 || !(det > 1e-12 * std::max(1.0, ss_ * cc_))) return {};
    const double a = (vs_ * cc_ - vc_ * sc_) / det;
    const double b = (vc_ * ss_ - vs_ * sc_) / det;
    return polar_from_sin_cos(a, b);
}

void ReassemblyBuffer::release(std::vector<DrivePacket>& out) {
    for (;;) {
        while (!pending_.empty() && pending_.begin()->first == next_seq_) {
            out.push_back(std::move(pending_.begin()->second));
            pending_.erase(pending_.begin());
            ++next_seq_;
            ++stats_.delivered;
        }
        if (pending_.size() <= capacity_) return;
        // Give up on the missing seqs in front of the oldest waiting packet.
        const std::uint32_t oldest = pending_.begin()->first;
        stats_.gaps += oldest - next_seq_;
        ++stats_.overflow_flushes;
        next_seq_ = oldest;
    }
}

std::vector<DrivePacket> ReassemblyBuffer::push(DrivePacket packet) {
    std::vector<DrivePacket> out;
    if (!started_) {
        started_ = true;
        next_seq_ = packet.seq;
    }
    if (packet.seq < next_seq_) {
        ++stats_.late_dropped;
        return out;
    }
    if (pending_.contains(packet.seq)) {
        ++stats_.duplicates;
        return out;
    }
    pending_.emplace(packet.seq, std::move(packet));
    release(out);
    return out;
}

std::vector<DrivePacket> ReassemblyBuffer::flush() {
    std::vector<DrivePacket> out;
    while (!pending_.empty()) {
        const std::uint32_t oldest = pending_.begin()->first;
        stats_.gaps += oldest - next_seq_;
        next_seq_ = oldest;
        const std::size_t before = out.size();
        release(out);
        if (out.size() == before) break;
    }
    return out;
}

double drive_scale_for(const ActuatorPhasor& phasors, double full_scale) noexcept {
    double peak = 0.0;
    for (double a : phasors.amplitude) peak = std::max(peak, a);
    return peak > full_scale ? full_scale / peak : 1.0;
}

ActuatorPhasor scale_phasors(const ActuatorPhasor& phasors, double scale) noexcept {
    ActuatorPhasor out = phasors;
    for (double& a : out.amplitude) a *= scale;
    return out;
}

EnergyImage board_sim(const ActuatorPhasor& received, const ResponseCache& cache) {
    return phasor_energy(cache, received);
}

}  // namespace platefocus
