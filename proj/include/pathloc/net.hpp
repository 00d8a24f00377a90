#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pathloc {

// IPv4 address in host byte order. The toolkit is IPv4-only; anything that
// looks like IPv6 is rejected at parse time.
struct Ipv4 {
    uint32_t value = 0;

    auto operator<=>(const Ipv4&) const = default;
};

std::optional<Ipv4> try_parse_ipv4(std::string_view text);

// Throws SchemaError on malformed input, with a dedicated message for IPv6.
Ipv4 parse_ipv4(std::string_view text, int line = -1);

std::string to_string(Ipv4 addr);

bool is_rfc1918(Ipv4 addr);

// "a.b.c.d/len" -> (network, prefix length). Host bits must be zero.
std::pair<Ipv4, int> parse_cidr(std::string_view text, int line = -1);

bool cidr_contains(Ipv4 net, int prefix_len, Ipv4 addr);

}  // namespace pathloc
