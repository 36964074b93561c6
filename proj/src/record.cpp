#include "airfed/record.hpp"

#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace airfed {

std::string round_record_header() {
  return "round,avg_accuracy,worst_accuracy,accuracy_std,round_energy_j,cumulative_energy_j,"
         "selected_clients,ascent_clients";
}

std::string format_round_record(const RoundRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{}", r.round, r.avg_accuracy, r.worst_accuracy,
                     r.accuracy_std, r.round_energy_j, r.cumulative_energy_j,
                     fmt::join(r.selected_clients, ";"), fmt::join(r.ascent_clients, ";"));
}

void RoundRecordWriter::write(const RoundRecord& record) {
  if (!header_written_) {
    sink_ << round_record_header() << '\n';
    header_written_ = true;
  }
  sink_ << format_round_record(record) << '\n';
  if (!sink_) throw std::runtime_error("failed to write round record " + std::to_string(record.round));
}

}  // namespace airfed
