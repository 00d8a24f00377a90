#include "pathloc/net.hpp"

#include <cctype>

#include "pathloc/error.hpp"
#include "pathloc/strings.hpp"

namespace pathloc {

std::optional<Ipv4> try_parse_ipv4(std::string_view text) {
    uint32_t value = 0;
    int octets = 0;
    uint32_t current = 0;
    int digits = 0;
    for (char c : text) {
        if (c == '.') {
            if (digits == 0 || octets >= 3) return std::nullopt;
            value = (value << 8) | current;
            ++octets;
            current = 0;
            digits = 0;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            if (digits >= 3) return std::nullopt;
            current = current * 10 + static_cast<uint32_t>(c - '0');
            if (current > 255) return std::nullopt;
            ++digits;
        } else {
            return std::nullopt;
        }
    }
    if (octets != 3 || digits == 0) return std::nullopt;
    value = (value << 8) | current;
    return Ipv4{value};
}

Ipv4 parse_ipv4(std::string_view text, int line) {
    if (auto v = try_parse_ipv4(trim(text))) return *v;
    if (text.find(':') != std::string_view::npos)
        throw schema_error("IPv6 address not supported (IPv4-only toolkit): '" + std::string(text) + "'", line);
    throw schema_error("malformed IPv4 address: '" + std::string(text) + "'", line);
}

std::string to_string(Ipv4 addr) {
    std::string out;
    out.reserve(15);
    for (int shift = 24; shift >= 0; shift -= 8) {
        out += std::to_string((addr.value >> shift) & 0xff);
        if (shift) out += '.';
    }
    return out;
}

bool is_rfc1918(Ipv4 addr) {
    uint32_t v = addr.value;
    if ((v & 0xff000000u) == 0x0a000000u) return true;         // 10/8
    if ((v & 0xfff00000u) == 0xac100000u) return true;         // 172.16/12
    if ((v & 0xffff0000u) == 0xc0a80000u) return true;         // 192.168/16
    return false;
}

std::pair<Ipv4, int> parse_cidr(std::string_view text, int line) {
    size_t slash = text.find('/');
    if (slash == std::string_view::npos)
        throw schema_error("malformed CIDR (missing /): '" + std::string(text) + "'", line);
    Ipv4 net = parse_ipv4(text.substr(0, slash), line);
    int len = static_cast<int>(parse_int(text.substr(slash + 1), 0, 32, "prefix length", line));
    uint32_t mask = len == 0 ? 0 : (~0u << (32 - len));
    if ((net.value & ~mask) != 0)
        throw schema_error("CIDR has host bits set: '" + std::string(text) + "'", line);
    return {net, len};
}

bool cidr_contains(Ipv4 net, int prefix_len, Ipv4 addr) {
    if (prefix_len <= 0) return true;
    uint32_t mask = ~0u << (32 - prefix_len);
    return (addr.value & mask) == (net.value & mask);
}

}  // namespace pathloc
