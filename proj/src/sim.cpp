#include "gnbdns/sim.hpp"

#include <cstdio>

namespace gnbdns::sim {

std::string format_ms(SimTime t) {
    char buf[40];
    bool neg = t < 0;
    uint64_t v = neg ? static_cast<uint64_t>(-t) : static_cast<uint64_t>(t);
    uint64_t whole = v / 1000000;
    uint64_t frac = v % 1000000;
    if (frac == 0) {
        std::snprintf(buf, sizeof(buf), "%s%llu", neg ? "-" : "",
                      static_cast<unsigned long long>(whole));
        return buf;
    }
    std::snprintf(buf, sizeof(buf), "%s%llu.%06llu", neg ? "-" : "",
                  static_cast<unsigned long long>(whole),
                  static_cast<unsigned long long>(frac));
    std::string s = buf;
    while (s.back() == '0') s.pop_back();
    return s;
}

}  // namespace gnbdns::sim
