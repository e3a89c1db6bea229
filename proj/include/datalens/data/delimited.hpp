#pragma once

#include <string>
#include <vector>

#include "datalens/data/dataset.hpp"

namespace datalens::data {

// Shape contract for a delimited time-series file: one sample per line,
// field 0 an integer label, then channels*length values channel-major.
// Rows are ordered train, validation, test; the schema carries the split
// sizes. n_test = -1 means "whatever remains".
struct DelimitedSchema {
    int channels = 1;
    int length = 0;
    bool has_header = false;
    char delimiter = ',';
    std::vector<long long> closed_labels; // empty = accept any labels seen
    long long n_train = 0;
    long long n_val = 0;
    long long n_test = -1;
};

// Loads and re-indexes labels densely (distinct raw labels sorted ascending
// map to 0..k-1). Unflipped: observed == true, flip_mask false. Ragged rows,
// non-numeric fields, and labels outside a declared closed set are parse
// errors carrying the 1-based line number.
TimeSeriesDataset load_delimited(const std::string& path, const DelimitedSchema& schema);

// Writes observed labels + values in the same format (raw labels are the
// dense indices). Round-trips bit-exactly through load_delimited.
void save_delimited(const TimeSeriesDataset& ds, const std::string& path,
                    bool header = false, char delimiter = ',');

} // namespace datalens::data
