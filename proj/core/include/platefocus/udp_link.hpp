#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "platefocus/drive_link.hpp"

namespace platefocus {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 48160;
};

struct StreamOptions {
    double duration_s = 1.0;
    /// Probability of silently skipping a packet (test mode). The first and
    /// last packets are always sent so the receiver can see every gap.
    double loss_rate = 0.0;
    std::uint64_t loss_seed = 1;
    /// Pace packets at the 2.5 ms wire cadence; otherwise send back-to-back.
    bool realtime = true;
    double full_scale = kDriveFullScale;
};

struct StreamStats {
    std::uint64_t packets_planned = 0;
    std::uint64_t packets_sent = 0;
    std::uint64_t packets_dropped = 0;
    std::vector<std::uint32_t> dropped_seqs;
};

/// Streams the five-channel drive for `phasors` (amplitudes must fit in
/// full_scale, see drive_scale_for). Throws SocketError.
StreamStats stream_phasors(const ActuatorPhasor& phasors, double frequency, const Endpoint& to,
                           const StreamOptions& options = {});

struct ReceiveOptions {
    double frequency = kDefaultDriveFrequency;
    double first_packet_timeout_s = 2.0;
    double idle_timeout_s = 0.25;
    double max_duration_s = 120.0;
    std::size_t reorder_capacity = 64;
};

struct ReceiveReport {
    ActuatorPhasor phasors;
    ReassemblyStats reassembly;
    std::uint64_t datagrams = 0;
    std::uint64_t decode_errors = 0;
    std::uint64_t samples_used = 0;
};

/// UDP socket bound on construction (port 0 picks a free port).
class UdpReceiver {
public:
    explicit UdpReceiver(const Endpoint& bind_to);
    ~UdpReceiver();
    UdpReceiver(const UdpReceiver&) = delete;
    UdpReceiver& operator=(const UdpReceiver&) = delete;

    std::uint16_t port() const noexcept { return port_; }

    /// Runs until the stream goes idle. Throws ReceiverTimeout if nothing
    /// arrives within first_packet_timeout_s.
    ReceiveReport receive(const ReceiveOptions& options);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Turns delivered packets into per-channel phasors over the longest prefix
/// spanning a whole number of drive periods.
class DriveEstimator {
public:
    explicit DriveEstimator(double frequency, double sample_rate = kLinkSampleRate,
                            double full_scale = kDriveFullScale);

    void add(const DrivePacket& packet);
    ActuatorPhasor estimate(std::uint64_t* samples_used = nullptr) const;

private:
    struct Sample {
        std::uint64_t index;
        std::int16_t value;
    };
    double frequency_;
    double sample_rate_;
    double full_scale_;
    std::vector<std::vector<Sample>> channels_;
};

}  // namespace platefocus
