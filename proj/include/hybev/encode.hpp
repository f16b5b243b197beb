#pragma once

#include <string>
#include <vector>

namespace hybev {

/// One-hot encoder for a categorical trip attribute. Levels are stored in
/// lexicographic order so training and prediction columns always align.
/// A level unseen at training time encodes as an all-zero row.
struct OneHotEncoder {
    std::string name;
    std::vector<std::string> levels;

    static OneHotEncoder fit(std::string name, const std::vector<std::string>& values);

    /// out has levels.size() entries; sets *unseen when the value is not a
    /// known level.
    std::vector<double> encode(const std::string& value, bool* unseen = nullptr) const;

    std::vector<std::string> column_names() const;
};

} // namespace hybev
