#pragma once

#include <jointopt/optimizer.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace jointopt {

// Grayscale image of one part, one pixel per element, top row = largest y.
// Pixel value round(255 * (1 - rho_hat)), so solid is dark.
std::vector<unsigned char> density_pixels(const PartMesh& part, const Vector& rho_hat);
void write_pgm(const std::filesystem::path& path, const PartMesh& part, const Vector& rho_hat);
void write_density_csv(const std::filesystem::path& path, const PartMesh& part,
                       const Vector& rho_hat);
void write_joint_trajectory_csv(const std::filesystem::path& path, const RunHistory& history);
void write_history_csv(const std::filesystem::path& path, const RunHistory& history);
void write_manifest(const std::filesystem::path& path, const ProblemConfig& config,
                    const RunResult& result, const std::vector<std::string>& files);

// Writes every artifact into `dir` (created if needed) and returns the file
// names written. Throws InputError if the directory cannot be written.
std::vector<std::string> export_results(const RunResult& result, const ProblemConfig& config,
                                        const MultiPartMesh& mesh,
                                        const std::filesystem::path& dir);

}  // namespace jointopt
