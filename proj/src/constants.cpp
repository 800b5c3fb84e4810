#include "vlab/constants.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace vlab {

namespace {

double lg(double x) { return std::lgamma(x); }

double lfact(int n) { return std::lgamma(n + 1.0); }

void need(bool ok, const char* what)
{
    if (!ok) throw std::domain_error(what);
}

void check_ns(int n, int s)
{
    need(n >= 2 && s >= 1 && s <= n, "section constants need 2 <= n and 1 <= s <= n");
}

const double kLogPi = std::log(M_PI);

}  // namespace

double kappa(int n)
{
    need(n >= 1, "kappa: n >= 1");
    return 2 * std::pow(M_PI, n / 2.0) / (n * std::tgamma(n / 2.0));
}

double sigma(int m)
{
    need(m >= 0, "sigma: m >= 0");
    return 2 * std::pow(M_PI, (m + 1) / 2.0) / std::tgamma((m + 1) / 2.0);
}

double wallis(int m)
{
    need(m >= 0, "wallis: m >= 0");
    return std::tgamma((m + 1) / 2.0) * std::sqrt(M_PI) / (2 * std::tgamma((m + 2) / 2.0));
}

double e_n(int n)
{
    need(n >= 2, "e_n: n >= 2");
    const double nn = n;
    const double l = std::log(2.0) + (nn - 1) / 2 * kLogPi + (nn - 2) * std::log(nn) +
                     nn * (lg(nn / 2) - lg((nn + 1) / 2)) + lg((nn * nn + 1) / 2) - lg(nn * nn / 2);
    return std::exp(l);
}

double d_n(int n)
{
    need(n >= 2, "d_n: n >= 2");
    const double nn = n, p = nn + 2 / nn;
    const double l = (nn - 3) / 2 * kLogPi + (p - 1) * std::log(nn) - lfact(n) - 2 / nn * std::log(2.0) -
                     std::log(nn + 2) + lg(p) + p * lg(nn / 2) + lg((nn * nn + 1) / 2) - lg(nn * nn / 2) -
                     nn * lg((nn + 1) / 2);
    return std::exp(l);
}

double a_n(int n)
{
    need(n >= 2, "a_n: n >= 2");
    const double nn = n;
    const double l = nn * std::log(2.0) + (nn * nn - 1) / 2 * kLogPi + lg((nn * nn + 1) / 2) + lg(nn / 2) -
                     lfact(n) - nn * lg((nn + 1) / 2) - lg(nn * nn / 2);
    return std::exp(l);
}

double b_n(int n)
{
    need(n >= 2, "b_n: n >= 2");
    const double nn = n;
    const double l = nn * std::log(2.0) + lg((nn * nn + 1) / 2) + (nn * nn + nn - 1) / 2 * kLogPi -
                     std::log(3 * nn * (nn + 2)) - lfact(n) - lg(nn * nn / 2) - nn * lg((nn + 1) / 2);
    return std::exp(l);
}

double k_n(int n)
{
    need(n >= 2, "k_n: n >= 2");
    const double nn = n;
    const double l = (nn + 1) * std::log(2.0) - lfact(n) + lg((nn * nn + 1) / 2) - lg(nn * nn / 2) +
                     (nn * nn + nn - 1) / 2 * kLogPi - nn * lg((nn + 1) / 2);
    return std::exp(l);
}

double v_ns(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s;
    return std::pow(2.0, 1 - ss / nn) * std::pow(nn, ss / nn - 1) * std::tgamma(ss / nn) *
           std::pow(std::tgamma(nn / 2), ss / nn) / std::tgamma(ss / 2);
}

double u_ns(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s, q = (ss + 2) / nn;
    return (ss + 2) * std::pow(nn, q - 2) * std::tgamma(q) * std::pow(std::tgamma(nn / 2), q) /
           (3 * std::tgamma(ss / 2) * (nn + 2) * std::pow(2.0, q) * M_PI);
}

double w_ns(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s, q = (ss + 2) / nn;
    return std::pow(nn, q - 1) * std::tgamma(q) * std::pow(std::tgamma(nn / 2), q) /
           (3 * std::tgamma(ss / 2) * ss * std::pow(2.0, q) * M_PI);
}

namespace {

// Gamma((ns+n-s+1)/2) / (Gamma((ns+n-s)/2) Gamma((n+1)/2) Gamma((n-s+1)/2)), shared by the printed section constants
double printed_section_log_factor(double nn, double ss)
{
    return lg((nn * ss + nn - ss + 1) / 2) - lg((nn * ss + nn - ss) / 2) - lg((nn + 1) / 2) - lg((nn - ss + 1) / 2);
}

}  // namespace

double delta_ns(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s;
    const double l = 2 * std::log(sigma(s - 1)) + ss * (nn - 1) / 2 * kLogPi + lg(ss / 2) + lg((ss * nn + 1) / 2) -
                     std::log(ss) - ss * lg((nn + 1) / 2) - lg((ss + 1) / 2) - lg(ss * nn / 2);
    return std::exp(l);
}

double delta_ns_printed(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s;
    const double l = (ss + 1) * std::log(2.0) + (ss + nn * ss) / 2 * kLogPi - lfact(s) - lg(ss / 2) -
                     (ss - 2) * lg(nn / 2) + printed_section_log_factor(nn, ss);
    return std::exp(l);
}

double e_ns_printed(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s;
    const double l = std::log(2.0) + ss / 2 * kLogPi + (ss - 1) * std::log(nn) + 2 * lg(nn / 2) - std::log(ss) -
                     lg(ss / 2) + printed_section_log_factor(nn, ss);
    return std::exp(l);
}

double e_ns(int n, int s)
{
    check_ns(n, s);
    return delta_ns(n, s) * std::tgamma(double(s)) / (n * std::pow(kappa(n), s));
}

double f_ns(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s;
    const double l = -2 / nn * std::log(2.0) + (ss - 1) / 2 * kLogPi + std::log(ss * nn + 2) + lg(ss + 2 / nn) +
                     (ss + 2 / nn - 2) * std::log(nn) + (2 + 2 / nn) * lg(nn / 2) - std::log(3 * (nn + 2)) -
                     lfact(s) - lg(ss / 2) + printed_section_log_factor(nn, ss);
    return std::exp(l);
}

double g_ns(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s;
    const double l = lg(ss + 2 / nn) + (ss + 2 / nn - 2) * std::log(nn) + (2 + 2 / nn) * lg(nn / 2) -
                     std::log(3 * ss * (nn + 2)) - lfact(s) - (2 / nn - 1) * std::log(2.0) - kLogPi -
                     2 * lg(ss / 2) + printed_section_log_factor(nn, ss);
    return std::exp(l);
}

double h_ns(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s;
    const double l = lg(ss + 2 / nn) + (ss + 2 / nn - 2) * std::log(nn) + (ss + 2 / nn) * lg(nn / 2) -
                     std::log(3 * (nn + 2)) - (ss + 2 / nn + 1) * std::log(2.0) - (ss * nn / 2 + 1) * kLogPi;
    return std::exp(l);
}

double section_N_curvature_coefficient(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s;
    return -delta_ns(n, s) * (ss - 1) * std::tgamma(ss + 2 / nn) /
           (2 * (nn + 2) * std::pow(kappa(n), ss + 2 / nn));
}

double section_volume_curvature_coefficient(int n, int s)
{
    check_ns(n, s);
    const double nn = n, ss = s, q = (ss + 2) / nn;
    return sigma(s - 1) * (nn - ss) * std::tgamma(q) / (2 * nn * (nn + 2) * std::pow(kappa(n), q));
}

const ExpansionConstants& expansion_constants(int n, std::optional<int> s)
{
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<const ExpansionConstants>> cache;
    need(n >= 2, "expansion_constants: n >= 2");
    if (s) check_ns(n, *s);
    const auto key = std::make_pair(n, s.value_or(0));
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto c = std::make_unique<ExpansionConstants>();
    c->n = n;
    c->s = s;
    auto& v = c->values;
    v["kappa_n"] = kappa(n);
    v["sigma_m"] = sigma(n - 1);
    v["wallis_m"] = wallis(n - 1);
    v["e_n"] = e_n(n);
    v["d_n"] = d_n(n);
    v["a_n"] = a_n(n);
    v["b_n"] = b_n(n);
    v["k_n"] = k_n(n);
    if (s) {
        const int q = *s;
        v["v_ns"] = v_ns(n, q);
        v["u_ns"] = u_ns(n, q);
        v["w_ns"] = w_ns(n, q);
        v["e_ns"] = e_ns(n, q);
        v["f_ns"] = f_ns(n, q);
        v["g_ns"] = g_ns(n, q);
        v["h_ns"] = h_ns(n, q);
        v["delta_ns"] = delta_ns(n, q);
        v["e_ns_printed"] = e_ns_printed(n, q);
        v["delta_ns_printed"] = delta_ns_printed(n, q);
        v["section_N_curvature_coefficient"] = section_N_curvature_coefficient(n, q);
        v["section_volume_curvature_coefficient"] = section_volume_curvature_coefficient(n, q);
    }
    auto& ref = *c;
    cache.emplace(key, std::move(c));
    return ref;
}

}  // namespace vlab
