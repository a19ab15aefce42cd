#include "tanhwf/problem.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <istream>
#include <random>
#include <stdexcept>

namespace tanhwf {

VectorXd observe(const MatrixXd& A, const VectorXd& x) {
    if (A.cols() != x.size())
        throw std::invalid_argument("observe: A has " +
                                    std::to_string(A.cols()) +
                                    " columns but x has length " +
                                    std::to_string(x.size()));
    return (A * x).array().square();
}

ProblemInstance make_instance(int n, int m, std::int64_t seed,
                              double signal_norm) {
    if (n < 1 || m < 1)
        throw std::invalid_argument("make_instance: n and m must be >= 1");
    if (!(signal_norm > 0.0))
        throw std::invalid_argument("make_instance: signal_norm must be > 0");

    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);

    ProblemInstance inst;
    inst.n = n;
    inst.m = m;
    inst.seed = seed;
    inst.signal_norm = signal_norm;

    inst.x.resize(n);
    do {
        for (int j = 0; j < n; ++j) inst.x(j) = gauss(rng);
    } while (inst.x.norm() == 0.0);
    inst.x *= signal_norm / inst.x.norm();

    inst.A.resize(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) inst.A(i, j) = gauss(rng);

    inst.y = observe(inst.A, inst.x);
    return inst;
}

ErrorStats relative_error(const VectorXd& z, const VectorXd& x) {
    if (z.size() != x.size())
        throw std::invalid_argument("relative_error: length mismatch");
    const double xn = x.norm();
    if (xn == 0.0)
        throw std::invalid_argument("relative_error: |x| must be > 0");

    const double dm = (z - x).norm();
    const double dp = (z + x).norm();

    ErrorStats st;
    st.aligned_sign = (dm <= dp) ? 1 : -1;  // + on ties
    st.rel_error = std::min(dm, dp) / xn;

    const VectorXd h = st.aligned_sign * z - x;
    const double hn = h.norm();
    if (hn == 0.0) {
        st.exact = true;
        st.correlation = 0.0;  // corr undefined at h = 0
    } else {
        st.correlation = x.dot(h) / (xn * hn);
    }
    return st;
}

namespace {

constexpr std::uint64_t kMagic = 0x7768665F696E7374ULL;  // "whf_inst"

void write_doubles(std::ostream& os, const double* p, std::size_t count) {
    os.write(reinterpret_cast<const char*>(p),
             static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::istream& is, double* p, std::size_t count) {
    is.read(reinterpret_cast<char*>(p),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw std::runtime_error("instance payload truncated");
}

}  // namespace

void save_instance(const ProblemInstance& inst, std::ostream& os) {
    std::uint64_t magic = kMagic;
    std::int64_t n = inst.n, m = inst.m;
    os.write(reinterpret_cast<const char*>(&magic), sizeof(magic));
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    os.write(reinterpret_cast<const char*>(&m), sizeof(m));
    os.write(reinterpret_cast<const char*>(&inst.seed), sizeof(inst.seed));
    os.write(reinterpret_cast<const char*>(&inst.signal_norm),
             sizeof(inst.signal_norm));
    write_doubles(os, inst.x.data(), static_cast<std::size_t>(inst.n));
    // row-major payload regardless of Eigen's storage order
    for (int i = 0; i < inst.m; ++i)
        for (int j = 0; j < inst.n; ++j) {
            double v = inst.A(i, j);
            write_doubles(os, &v, 1);
        }
    write_doubles(os, inst.y.data(), static_cast<std::size_t>(inst.m));
}

ProblemInstance load_instance(std::istream& is) {
    std::uint64_t magic = 0;
    std::int64_t n = 0, m = 0;
    ProblemInstance inst;
    is.read(reinterpret_cast<char*>(&magic), sizeof(magic));
    if (!is || magic != kMagic)
        throw std::runtime_error("not an instance archive (bad magic)");
    is.read(reinterpret_cast<char*>(&n), sizeof(n));
    is.read(reinterpret_cast<char*>(&m), sizeof(m));
    is.read(reinterpret_cast<char*>(&inst.seed), sizeof(inst.seed));
    is.read(reinterpret_cast<char*>(&inst.signal_norm),
            sizeof(inst.signal_norm));
    if (!is || n < 1 || m < 1)
        throw std::runtime_error("instance header corrupt");
    inst.n = static_cast<int>(n);
    inst.m = static_cast<int>(m);
    inst.x.resize(inst.n);
    read_doubles(is, inst.x.data(), static_cast<std::size_t>(inst.n));
    inst.A.resize(inst.m, inst.n);
    for (int i = 0; i < inst.m; ++i)
        for (int j = 0; j < inst.n; ++j) read_doubles(is, &inst.A(i, j), 1);
    inst.y.resize(inst.m);
    read_doubles(is, inst.y.data(), static_cast<std::size_t>(inst.m));
    return inst;
}

void save_instance_file(const ProblemInstance& inst, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    save_instance(inst, os);
}

ProblemInstance load_instance_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return load_instance(is);
}

}  // namespace tanhwf
