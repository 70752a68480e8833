#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "channel.hpp"
#include "estimation.hpp"
#include "montecarlo.hpp"
#include "solver.hpp"

namespace afrelay {

inline constexpr const char* kSeriesHeader = "axis,value,mse_mean,mse_stderr,ber_mean,ber_stderr,trials,variant";
inline constexpr const char* kSolutionHeader = "subcarrier,power,gamma,eta,active_modes,lambda_f,lambda_g";
inline constexpr const char* kMomentsHeader = "matrix,subcarrier,row,col,re,im";

// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

void write_series_csv(std::ostream& out, const std::vector<MetricSeries>& series);
// Parses the series format back (samples are not stored in CSV). Throws kIo on
// a malformed file, naming the missing column.
std::vector<MetricSeries> read_series_csv(std::istream& in);

// lambda_f and lambda_g are ';'-separated lists over the active modes.
void write_solution_csv(std::ostream& out, const TransceiverSolution& solution);

// Header `tap,power,rows,cols,re_0,im_0,...`; entries in column-major order.
void write_channel_csv(std::ostream& out, const MultipathChannel& channel);
MultipathChannel read_channel_csv(std::istream& in);

// `phi` rows use subcarrier -1; `psi` rows carry their subcarrier index.
void write_moments_csv(std::ostream& out, const ErrorMoments& moments);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace afrelay
