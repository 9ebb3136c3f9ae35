#include "platefocus/udp_link.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <thread>
#include <utility>

#include "platefocus/errors.hpp"
#include "platefocus/rng.hpp"

namespace platefocus {

namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void throw_errno(const std::string& what) {
    throw Error(ErrorKind::Socket, what + ": " + std::strerror(errno));
}

sockaddr_in make_address(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1)
        throw Error(ErrorKind::Socket, "invalid IPv4 address '" + ep.host + "'");
    return addr;
}

class Socket {
public:
    Socket() : fd_(::socket(AF_INET, SOCK_DGRAM, 0)) {
        if (fd_ < 0) throw_errno("socket");
    }
    ~Socket() {
        if (fd_ >= 0) ::close(fd_);
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    int get() const noexcept { return fd_; }
    int release() noexcept { return std::exchange(fd_, -1); }

private:
    int fd_;
};

}  // namespace

StreamStats stream_phasors(const ActuatorPhasor& phasors, double frequency, const Endpoint& to,
                           const StreamOptions& options) {
    if (!(options.duration_s > 0.0)) throw Error(ErrorKind::Config, "stream duration must be positive");
    if (!(options.loss_rate >= 0.0 && options.loss_rate < 1.0)) throw Error(ErrorKind::Config, "loss rate must be in [0, 1)");
    for (double a : phasors.amplitude)
        if (!(a >= 0.0 && a <= options.full_scale))
            throw Error(ErrorKind::GainOutOfRange, "drive amplitude exceeds the link full scale; rescale first");

    Socket sock;
    const sockaddr_in addr = make_address(to);
    Rng loss_rng(options.loss_seed);

    StreamStats stats;
    stats.packets_planned = static_cast<std::uint64_t>(
        std::ceil(options.duration_s * kLinkSampleRate / kLinkSamplesPerChannel - 1e-9));
    const auto cadence = std::chrono::microseconds(1000000u * kLinkSamplesPerChannel / kLinkSampleRate);
    const auto start = Clock::now();

    for (std::uint64_t k = 0; k < stats.packets_planned; ++k) {
        const auto seq = static_cast<std::uint32_t>(k);
        const bool interior = k > 0 && k + 1 < stats.packets_planned;
        const bool drop = options.loss_rate > 0.0 && loss_rng.uniform01() < options.loss_rate && interior;
        if (options.realtime) std::this_thread::sleep_until(start + cadence * static_cast<long>(k));
        if (drop) {
            ++stats.packets_dropped;
            stats.dropped_seqs.push_back(seq);
            continue;
        }
        const std::vector<std::uint8_t> bytes = encode_packet(make_drive_packet(phasors, frequency, seq, options.full_scale));
        if (::sendto(sock.get(), bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0)
            throw_errno("sendto");
        ++stats.packets_sent;
    }
    return stats;
}

UdpReceiver::UdpReceiver(const Endpoint& bind_to) {
    Socket sock;
    const int one = 1;
    ::setsockopt(sock.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    const int rcvbuf = 1 << 21;
    ::setsockopt(sock.get(), SOL_SOCKET, SO_RCVBUF, &rcvbuf, sizeof rcvbuf);
    const sockaddr_in addr = make_address(bind_to);
    if (::bind(sock.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) throw_errno("bind");
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    if (::getsockname(sock.get(), reinterpret_cast<sockaddr*>(&bound), &len) < 0) throw_errno("getsockname");
    port_ = ntohs(bound.sin_port);
    fd_ = sock.release();
}

UdpReceiver::~UdpReceiver() {
    if (fd_ >= 0) ::close(fd_);
}

ReceiveReport UdpReceiver::receive(const ReceiveOptions& options) {
    ReassemblyBuffer buffer(options.reorder_capacity);
    DriveEstimator estimator(options.frequency);
    ReceiveReport report;

    const auto start = Clock::now();
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(options.max_duration_s));
    bool any = false;
    std::array<std::uint8_t, 2048> datagram{};

    while (Clock::now() < deadline) {
        const double wait_s = any ? options.idle_timeout_s : options.first_packet_timeout_s;
        pollfd pfd{fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(std::ceil(wait_s * 1000.0)));
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw_errno("poll");
        }
        if (ready == 0) {
            if (!any) throw Error(ErrorKind::ReceiverTimeout, "no drive packets received");
            break;
        }
        const ssize_t n = ::recv(fd_, datagram.data(), datagram.size(), 0);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            throw_errno("recv");
        }
        ++report.datagrams;
        DrivePacket packet;
        try {
            packet = decode_packet(std::span<const std::uint8_t>(datagram.data(), static_cast<std::size_t>(n)));
        } catch (const Error&) {
            ++report.decode_errors;
            continue;
        }
        if (packet.channel_count != kLinkChannels) {
            ++report.decode_errors;
            continue;
        }
        any = true;
        for (const DrivePacket& p : buffer.push(std::move(packet))) estimator.add(p);
    }
    for (const DrivePacket& p : buffer.flush()) estimator.add(p);
    report.reassembly = buffer.stats();
    report.phasors = estimator.estimate(&report.samples_used);
    return report;
}

DriveEstimator::DriveEstimator(double frequency, double sample_rate, double full_scale)
    : frequency_(frequency), sample_rate_(sample_rate), full_scale_(full_scale), channels_(kActuatorCount) {}

void DriveEstimator::add(const DrivePacket& packet) {
    const std::uint64_t first = static_cast<std::uint64_t>(packet.seq) * packet.samples_per_channel;
    const std::size_t channels = std::min<std::size_t>(packet.channel_count, kActuatorCount);
    for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t s = 0; s < packet.samples_per_channel; ++s)
            channels_[c].push_back({first + s, packet.sample(c, s)});
}

ActuatorPhasor DriveEstimator::estimate(std::uint64_t* samples_used) const {
    ActuatorPhasor out;
    std::uint64_t used = 0;
    for (std::size_t c = 0; c < kActuatorCount; ++c) {
        const auto& samples = channels_[c];
        if (samples.empty()) continue;
        const std::uint64_t first = samples.front().index;
        const std::uint64_t span = samples.back().index + 1 - first;
        // Smallest whole-period sample count, when f and the rate are integers.
        std::uint64_t window = span;
        const double f = frequency_;
        const double r = sample_rate_;
        if (f == std::floor(f) && r == std::floor(r)) {
            const auto fi = static_cast<std::uint64_t>(f);
            const auto ri = static_cast<std::uint64_t>(r);
            const std::uint64_t quantum = ri / std::gcd(fi, ri);
            if (span >= quantum) window = span / quantum * quantum;
        }
        PhasorAccumulator acc(frequency_, sample_rate_);
        for (const Sample& s : samples) {
            if (s.index - first >= window) break;
            acc.add(s.index, s.value * full_scale_ / 32767.0);
        }
        const ChannelPhasor p = acc.estimate();
        out.amplitude[c] = p.amplitude;
        out.phase_deg[c] = p.phase_deg;
        used = std::max<std::uint64_t>(used, acc.count());
    }
    if (samples_used) *samples_used = used;
    return out;
}

}  // namespace platefocus
