#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace amf {

/// ETF class / subclass table used to group basis assets before prototype
/// clustering. The built-in table has 10 classes and 73 subclasses.
class Taxonomy {
public:
    /// pairs of (subclass, class). Throws Error(Validation) on a subclass
    /// listed under two classes.
    explicit Taxonomy(const std::vector<std::pair<std::string, std::string>>& subclass_to_class);

    static const Taxonomy& builtin();

    /// Reads a two-column CSV (subclass,class) with a header row.
    static Taxonomy from_csv(const std::string& path);

    const std::vector<std::string>& classes() const noexcept { return classes_; }
    const std::map<std::string, std::string>& subclasses() const noexcept { return subclass_class_; }

    std::optional<std::string> class_of(const std::string& subclass) const;
    bool contains(const std::string& cls, const std::string& subclass) const;

private:
    std::vector<std::string> classes_;  // in first-appearance order
    std::map<std::string, std::string> subclass_class_;
};

}  // namespace amf
