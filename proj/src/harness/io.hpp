#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qg/harness.hpp"

namespace qg::harness::detail {

// Collects artifacts in write order; each file is written once by its owner.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir);
    void write(const std::string& name, const std::string& bytes);
    void write_json(const std::string& name, const nlohmann::json& j);
    const std::vector<Artifact>& artifacts() const { return list_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<Artifact> list_;
};

// Fixed-column CSV with 17 significant digits.
class Csv {
public:
    explicit Csv(std::vector<std::string> header);
    void row(const std::vector<double>& values);
    const std::string& str() const { return s_; }

private:
    std::size_t cols_;
    std::string s_;
};

std::string checkpoint_bytes(const SpectralField2L& q, double t);
std::string member_name(const std::string& stem, std::size_t i, const std::string& ext);

}  // namespace qg::harness::detail
