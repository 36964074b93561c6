#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace airfed {

struct RoundRecord {
  std::size_t round = 0;
  double avg_accuracy = 0.0;
  double worst_accuracy = 0.0;
  double accuracy_std = 0.0;
  double round_energy_j = 0.0;
  double cumulative_energy_j = 0.0;
  std::vector<std::size_t> selected_clients;
  std::vector<std::size_t> ascent_clients;
};

// Comma-separated columns in field order; client-id lists are joined by ';'.
// Reals use the shortest round-trip representation.
std::string round_record_header();
std::string format_round_record(const RoundRecord& record);

// Appends one line per record to a sink, emitting the header before the first.
class RoundRecordWriter {
 public:
  explicit RoundRecordWriter(std::ostream& sink) : sink_(sink) {}

  void write(const RoundRecord& record);

 private:
  std::ostream& sink_;
  bool header_written_ = false;
};

}  // namespace airfed
