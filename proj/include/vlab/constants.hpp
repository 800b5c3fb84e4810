#pragma once

#include <map>
#include <optional>
#include <string>

namespace vlab {

double kappa(int n);
double sigma(int m);
double wallis(int m);

double e_n(int n);
double d_n(int n);
double a_n(int n);
double b_n(int n);
double k_n(int n);

double v_ns(int n, int s);
double u_ns(int n, int s);
double w_ns(int n, int s);
double e_ns(int n, int s);
double f_ns(int n, int s);
double g_ns(int n, int s);
double h_ns(int n, int s);
// integral of the section simplex volume over all directions
double delta_ns(int n, int s);
double delta_ns_printed(int n, int s);
double e_ns_printed(int n, int s);

// coefficient of K in the lambda^{-2/n} term of the section vertex count on constant curvature K
double section_N_curvature_coefficient(int n, int s);
// same for the section volume, lambda^{-(s+2)/n} term
double section_volume_curvature_coefficient(int n, int s);

struct ExpansionConstants {
    int n = 0;
    std::optional<int> s;
    std::map<std::string, double> values;
};

// memoized per (n, s)
const ExpansionConstants& expansion_constants(int n, std::optional<int> s = std::nullopt);

}  // namespace vlab
