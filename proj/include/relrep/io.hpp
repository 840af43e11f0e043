// CSV helpers for matrices and label vectors. All float formatting is
// deterministic; %.17g round-trips doubles exactly.
#ifndef RELREP_IO_HPP
#define RELREP_IO_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relrep {

std::string format_double(double v, int sig_digits = 17);

std::string matrix_to_csv(const Eigen::MatrixXd& m, int sig_digits = 17);
Eigen::MatrixXd matrix_from_csv(const std::string& text);

std::string labels_to_csv(const std::vector<int>& labels);
std::vector<int> labels_from_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace relrep

#endif
