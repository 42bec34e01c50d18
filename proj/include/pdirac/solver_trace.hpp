#ifndef PDIRAC_SOLVER_TRACE_HPP
#define PDIRAC_SOLVER_TRACE_HPP

#include <cstdint>
#include <vector>

namespace pdirac {

/// One solver iteration record. phase tags: 'i' start, 'd' descent,
/// 'm' path max-node update, 'r' path relaxation, 'x' residual polishing,
/// 'e' ray doubling, 'R' restart marker.
struct TraceEntry {
  int iter = 0;
  int restart = 0;
  char phase = 'i';
  double value = 0.0;
  double residual = 0.0;
  double norm_1p = 0.0;
  double step = 0.0;
};

using Trace = std::vector<TraceEntry>;

}  // namespace pdirac

#endif
