#pragma once

#include "hybev/encode.hpp"
#include "hybev/trip.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace hybev {

/// Long-format observation matrix: one row per (trip, sample). Numeric
/// features are copied per sample, categorical attributes are one-hot
/// expanded with the stored encoders. subject_of_row carries the trip id
/// each row came from.
struct DesignMatrix {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<double> response;
    std::vector<std::string> subject_of_row;
    std::vector<OneHotEncoder> encoders;
    std::vector<std::string> features; // feature list the design was built from
    std::size_t unseen_levels = 0;     // rows that hit an unknown categorical level

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return columns.size(); }

    /// Column index by name; SchemaError when absent.
    std::size_t col(std::string_view name) const;
    bool has_col(std::string_view name) const;

    /// Subject ids in first-appearance order.
    std::vector<std::string> subjects() const;
};

/// Builds the training design. features may be numeric channel names or
/// categorical attribute names; a channel missing on any trip is a
/// SchemaError naming the trip.
DesignMatrix assemble_design(const PanelDataset& panel, const std::vector<std::string>& features,
                             const std::string& response);

/// Prediction-time rows for one trip, aligned to a training design's
/// encoders and column order. Unseen categorical levels encode as zeros
/// and bump unseen_levels. response is left empty when response_channel
/// is empty.
DesignMatrix design_for_trip(const TripSeries& trip, const DesignMatrix& training,
                             const std::string& response_channel = "");

} // namespace hybev
