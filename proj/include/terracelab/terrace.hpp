#pragma once

#include <optional>
#include <vector>

#include "terracelab/front.hpp"
#include "terracelab/nonlinearity.hpp"

namespace terracelab {

// One attempted connection between two stable zeros.
struct PairEntry {
  double q_top = 0.0;
  double q_bot = 0.0;
  bool energy_holds = false;
  double energy_margin = 0.0;
  bool has_front = false;
  double c = 0.0;           // speed when has_front
  double connection = 0.0;  // zero actually reached by the limiting trajectory
  std::optional<WaveProfile> profile;
};

struct Terrace {
  std::vector<double> floors;  // descending, p ... 0
  std::vector<WaveProfile> waves;
  std::vector<double> speeds;
  std::vector<PairEntry> pair_table;

  std::size_t size() const noexcept { return waves.size(); }
};

struct TerraceOptions {
  FrontOptions front{};
  double tol_speed = 1e-6;
  int workers = 1;
};

// Brute-force chain enumeration over the pairwise front table; exactly one chain
// with nondecreasing speeds must survive.
Terrace decompose(const Nonlinearity& f, const TerraceOptions& opts = {});

struct OrderReport {
  double c = 0.0;                // direct q_top -> q_bot
  std::optional<double> c_top;   // q_top -> q_mid
  std::optional<double> c_bot;   // q_mid -> q_bot
  bool pass = true;
  std::vector<std::string> messages;
};

// Upper partial front must be faster and lower partial front slower than the direct one.
OrderReport speed_order_check(const Nonlinearity& f, double q_top, double q_mid, double q_bot,
                              const TerraceOptions& opts = {});

}  // namespace terracelab
