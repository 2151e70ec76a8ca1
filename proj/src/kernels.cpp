#include "polaron/kernels.hpp"

#include "polaron/errors.hpp"
#include "polaron/pfld.hpp"

#include <json.hpp>

#include <fstream>

namespace polaron {

KernelPair build_kernels(const PekarSolution& sol, const ModeSet& modes, const Resolvent& R) {
    const Grid3& g = sol.phi0.grid;
    require_commensurate(modes, g);
    const int M = modes.size();

    std::vector<Field> b, u, hu;  // hu_j = (h - lambda) u_j
    for (int j = 0; j < M; ++j) {
        Field bj(g, plane_wave(g, -modes.k[std::size_t(j)]).values.cwiseProduct(sol.phi0.values));
        Field uj = R.apply(bj);
        Field hj = R.apply_h(uj);
        hj.values -= R.lambda() * uj.values;
        b.push_back(std::move(bj));
        u.push_back(std::move(uj));
        hu.push_back(std::move(hj));
    }

    // S(i,j) = <b_i, R b_j> in variational form: Hermitian by construction and
    // accurate to second order in the linear-solve error.
    Eigen::MatrixXcd S(M, M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            const auto ui = std::size_t(i), uj = std::size_t(j);
            S(i, j) = inner(u[ui], b[uj]) + inner(b[ui], u[uj]) - inner(u[ui], hu[uj]);
        }
    }

    auto pref = [&](int i, int j) {
        return std::sqrt(modes.w[std::size_t(i)] * modes.w[std::size_t(j)]) * modes.coupling_amplitude(i) *
               modes.coupling_amplitude(j);
    };
    auto bar = [&](int i) { return modes.partner[std::size_t(i)]; };

    KernelPair kp;
    kp.modes = modes;
    kp.K.resize(M, M);
    kp.G.resize(M, M);
    kp.raw_pp.resize(M, M);
    kp.raw_pm.resize(M, M);
    kp.raw_mp.resize(M, M);
    kp.raw_mm.resize(M, M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            const double c = pref(i, j);
            kp.K(i, j) = c * (S(bar(i), j) + S(bar(j), i));
            kp.G(i, j) = c * (S(i, j) + S(bar(i), bar(j)));
            kp.raw_pp(i, j) = c * S(bar(i), j);
            kp.raw_pm(i, j) = c * S(bar(i), bar(j));
            kp.raw_mp(i, j) = c * S(i, j);
            kp.raw_mm(i, j) = c * S(i, bar(j));
        }
    }
    kp.epsilon = 0.5 * kp.G.trace().real();

    kp.diagonal_check.resize(M);
    for (int i = 0; i < M; ++i) {
        kp.diagonal_check[i] = pref(i, i) * inner(u[std::size_t(i)], hu[std::size_t(i)]).real();
    }
    return kp;
}

KernelDiagnostics diagnose(const KernelPair& kp, double gap) {
    const int M = kp.modes.size();
    KernelDiagnostics d;
    d.k_symmetry = (kp.K - kp.K.transpose()).cwiseAbs().maxCoeff();
    d.g_hermiticity = (kp.G - kp.G.adjoint()).cwiseAbs().maxCoeff();
    d.k_imag = kp.K.imag().cwiseAbs().maxCoeff();
    d.g_imag = kp.G.imag().cwiseAbs().maxCoeff();
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            const int ib = kp.modes.partner[std::size_t(i)], jb = kp.modes.partner[std::size_t(j)];
            d.k_parity = std::max(d.k_parity, std::abs(std::conj(kp.K(i, j)) - kp.K(ib, jb)));
            d.g_parity = std::max(d.g_parity, std::abs(std::conj(kp.G(i, j)) - kp.G(j, i)));
        }
        d.cross_route = std::max(d.cross_route, std::abs(0.5 * kp.G(i, i).real() - kp.diagonal_check[i]));
    }
    d.epsilon_defect = std::abs(kp.epsilon - 0.5 * kp.G.trace().real());
    d.min_g_diagonal = kp.G.diagonal().real().minCoeff();
    double bound = 0.0;
    for (int i = 0; i < M; ++i) bound += kp.modes.w[std::size_t(i)] * std::pow(kp.modes.coupling_amplitude(i), 2);
    bound *= 2.0 / gap;
    const double knorm = Eigen::JacobiSVD<Eigen::MatrixXcd>(kp.K).singularValues()[0];
    const double gnorm = Eigen::JacobiSVD<Eigen::MatrixXcd>(kp.G).singularValues()[0];
    d.norm_bound_ratio = std::max(knorm, gnorm) / bound;
    return d;
}

void save_kernels(const KernelPair& kp, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    pfld::save_matrix(kp.K, dir / "K.pfld", "K");
    pfld::save_matrix(kp.G, dir / "G.pfld", "G");
    nlohmann::json j;
    nlohmann::json modes = nlohmann::json::array();
    for (int i = 0; i < kp.modes.size(); ++i) {
        const Vec3& k = kp.modes.k[std::size_t(i)];
        modes.push_back({{"k", {k[0], k[1], k[2]}}, {"w", kp.modes.w[std::size_t(i)]}});
    }
    j["modes"] = modes;
    j["epsilon"] = kp.epsilon;
    std::ofstream out(dir / "kernels.json");
    if (!out) throw IoError("save_kernels: cannot write kernels.json in " + dir.string());
    out << j.dump(2) << '\n';
}

KernelPair load_kernels(const std::filesystem::path& dir) {
    std::ifstream in(dir / "kernels.json");
    if (!in) throw IoError("load_kernels: missing kernels.json in " + dir.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("load_kernels: bad kernels.json: ") + e.what());
    }
    std::vector<Vec3> k;
    std::vector<double> w;
    for (const auto& m : j.at("modes")) {
        const auto v = m.at("k").get<std::vector<double>>();
        k.emplace_back(v.at(0), v.at(1), v.at(2));
        w.push_back(m.at("w").get<double>());
    }
    KernelPair kp;
    kp.modes = make_mode_set(std::move(k), std::move(w));
    kp.K = pfld::load_matrix(dir / "K.pfld");
    kp.G = pfld::load_matrix(dir / "G.pfld");
    kp.epsilon = j.at("epsilon").get<double>();
    const int M = kp.modes.size();
    if (kp.K.rows() != M || kp.K.cols() != M || kp.G.rows() != M || kp.G.cols() != M) {
        throw IoError("load_kernels: kernel shapes do not match the mode set");
    }
    return kp;
}

}  // namespace polaron
