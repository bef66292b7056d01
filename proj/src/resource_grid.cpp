#include "v2x/resource_grid.hpp"

#include <array>
#include <string>

namespace v2x {

namespace {

// 3GPP TS 36.213 Table 7.1.7.2.1-1, row I_TBS = 5, N_PRB = 1..50.
constexpr std::array<int, 50> kTbsItbs5 = {
    72,   144,  224,  328,  424,  504,  600,  680,  776,  872,  968,  1032, 1128,
    1224, 1320, 1384, 1480, 1544, 1672, 1736, 1864, 1928, 2024, 2088, 2216, 2280,
    2344, 2472, 2536, 2664, 2728, 2792, 2856, 2984, 3112, 3112, 3240, 3368, 3496,
    3496, 3624, 3752, 3752, 3880, 4008, 4008, 4136, 4264, 4392, 4392};

bool is_dft_size(int n) {
  if (n <= 0) return false;
  for (int f : {2, 3, 5}) {
    while (n % f == 0) n /= f;
  }
  return n == 1;
}

}  // namespace

int rb_count_for_bandwidth(int bandwidth_mhz) {
  switch (bandwidth_mhz) {
    case 10: return 50;
    case 20: return 100;
    default:
      throw ConfigError("bandwidth_mhz must be 10 or 20, got " + std::to_string(bandwidth_mhz));
  }
}

int transport_block_size_bits(int mcs_index, int prb_count) {
  if (mcs_index != 5) {
    throw ConfigError("no transport block table for MCS " + std::to_string(mcs_index) +
                      " (supported: 5)");
  }
  if (prb_count < 1 || prb_count > static_cast<int>(kTbsItbs5.size())) {
    throw ConfigError("PSSCH allocation of " + std::to_string(prb_count) +
                      " PRBs is outside the transport block table");
  }
  return kTbsItbs5[static_cast<std::size_t>(prb_count - 1)];
}

int pssch_prb_count(int subchannels, int subchannel_size_rb) {
  int prb = subchannels * subchannel_size_rb - 2;
  while (prb > 0 && !is_dft_size(prb)) --prb;
  return prb;
}

int subchannels_for_packet(int payload_bytes, int mcs_index, const GridConfig& grid) {
  if (payload_bytes <= 0) {
    throw ConfigError("payload_bytes must be positive, got " + std::to_string(payload_bytes));
  }
  const int payload_bits = payload_bytes * 8;
  for (int n = 1; n <= grid.subchannels_per_subframe; ++n) {
    const int prb = pssch_prb_count(n, grid.subchannel_size_rb);
    if (prb < 1) continue;
    if (prb > 50) break;
    if (transport_block_size_bits(mcs_index, prb) >= payload_bits) return n;
  }
  throw ConfigError("payload of " + std::to_string(payload_bytes) + " bytes does not fit in one " +
                    "subframe at MCS " + std::to_string(mcs_index));
}

GridConfig make_grid(int bandwidth_mhz, int subchannel_size_rb, int mcs_index, int payload_bytes) {
  GridConfig g;
  g.bandwidth_mhz = bandwidth_mhz;
  g.rb_count_per_subframe = rb_count_for_bandwidth(bandwidth_mhz);
  if (subchannel_size_rb <= 0 || g.rb_count_per_subframe % subchannel_size_rb != 0) {
    throw ConfigError("subchannel_size_rb " + std::to_string(subchannel_size_rb) +
                      " does not divide " + std::to_string(g.rb_count_per_subframe) + " RBs");
  }
  g.subchannel_size_rb = subchannel_size_rb;
  g.subchannels_per_subframe = g.rb_count_per_subframe / subchannel_size_rb;
  g.mcs_index = mcs_index;
  g.payload_bytes = payload_bytes;
  g.subchannels_per_packet = subchannels_for_packet(payload_bytes, mcs_index, g);
  return g;
}

std::vector<ResourceId> resources_in_window(Subframe start, Subframe end, const GridConfig& grid) {
  std::vector<ResourceId> out;
  if (end <= start) return out;
  out.reserve(static_cast<std::size_t>((end - start) * grid.subchannels_per_subframe));
  for (Subframe t = start; t < end; ++t) {
    for (int s = 0; s < grid.subchannels_per_subframe; ++s) out.push_back({t, s});
  }
  return out;
}

}  // namespace v2x
