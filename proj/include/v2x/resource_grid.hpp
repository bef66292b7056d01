#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "v2x/types.hpp"

namespace v2x {

inline constexpr Subframe kSubframeDurationMs = 1;
inline constexpr double kResourceBlockHz = 180e3;
inline constexpr int kSubcarriersPerRb = 12;

/// Time/frequency layout of the sidelink resource pool. Immutable once built
/// by make_grid(); the per-packet subchannel count is derived there.
struct GridConfig {
  int bandwidth_mhz = 10;
  int rb_count_per_subframe = 50;
  int subchannel_size_rb = 10;
  int subchannels_per_subframe = 5;
  int mcs_index = 5;
  int payload_bytes = 190;
  int subchannels_per_packet = 2;

  /// Distinct adjacent packet-wide placements within one subframe.
  int slots_per_subframe() const { return subchannels_per_subframe - subchannels_per_packet + 1; }
  /// Resource blocks occupied by one packet (SCI + TB).
  int packet_rb_count() const { return subchannels_per_packet * subchannel_size_rb; }
};

/// One subchannel in one subframe. For packet placements, `subchannel` is the
/// lowest occupied subchannel.
struct ResourceId {
  Subframe subframe = 0;
  int subchannel = 0;

  auto operator<=>(const ResourceId&) const = default;
};

struct BsmPacket {
  std::uint64_t packet_id = 0;
  VueId source_vue = 0;
  Subframe generation_time = 0;
  int payload_bytes = 190;
  int subchannels_needed = 2;
};

int rb_count_for_bandwidth(int bandwidth_mhz);

/// Transport block size in bits for a PSSCH allocation of `prb_count` PRBs.
/// Only the MCS used by the BSM profile (MCS 5, QPSK, I_TBS 5) is tabulated.
int transport_block_size_bits(int mcs_index, int prb_count);

/// PSSCH PRBs available in `subchannels` adjacent subchannels: two RBs of the
/// first subchannel carry the SCI and the remainder is rounded down to a
/// 2^a*3^b*5^c size.
int pssch_prb_count(int subchannels, int subchannel_size_rb);

/// Smallest number of adjacent subchannels whose transport block holds the payload.
int subchannels_for_packet(int payload_bytes, int mcs_index, const GridConfig& grid);

/// Validated grid with the per-packet subchannel count cached.
GridConfig make_grid(int bandwidth_mhz, int subchannel_size_rb = 10, int mcs_index = 5,
                     int payload_bytes = 190);

/// Every (subframe, subchannel) in [start, end), subframe-major.
std::vector<ResourceId> resources_in_window(Subframe start, Subframe end, const GridConfig& grid);

}  // namespace v2x
