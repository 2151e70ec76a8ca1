#include "polaron/fock.hpp"

#include "polaron/errors.hpp"

#include <cmath>

namespace polaron {
namespace {

using Triplet = Eigen::Triplet<cd>;

SparseMat from_triplets(Eigen::Index dim, const std::vector<Triplet>& t) {
    SparseMat m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

}  // namespace

FockSpace::FockSpace(int M, int n_max, Eigen::Index cap) : M_(M), n_max_(n_max), dim_(1) {
    if (M < 1) throw InvalidArgument("FockSpace: need at least one mode");
    if (n_max < 0) throw InvalidArgument("FockSpace: n_max must be non-negative");
    stride_.resize(std::size_t(M));
    for (int i = 0; i < M; ++i) {
        stride_[std::size_t(i)] = dim_;
        if (dim_ > cap / (n_max + 1)) {
            throw InvalidArgument("FockSpace: dimension exceeds cap " + std::to_string(cap));
        }
        dim_ *= (n_max + 1);
    }
}

std::vector<int> FockSpace::occupations(Eigen::Index index) const {
    std::vector<int> occ(static_cast<std::size_t>(M_));
    for (int i = 0; i < M_; ++i) occ[std::size_t(i)] = occupation(index, i);
    return occ;
}

Eigen::Index FockSpace::index(const std::vector<int>& occ) const {
    if (int(occ.size()) != M_) throw InvalidArgument("FockSpace::index: wrong tuple length");
    Eigen::Index idx = 0;
    for (int i = 0; i < M_; ++i) {
        if (occ[std::size_t(i)] < 0 || occ[std::size_t(i)] > n_max_) {
            throw InvalidArgument("FockSpace::index: occupation out of range");
        }
        idx += occ[std::size_t(i)] * stride_[std::size_t(i)];
    }
    return idx;
}

int FockSpace::total(Eigen::Index index) const noexcept {
    int n = 0;
    for (int i = 0; i < M_; ++i) n += occupation(index, i);
    return n;
}

SparseMat ladder(const FockSpace& fs, int i) {
    if (i < 0 || i >= fs.modes()) throw InvalidArgument("ladder: mode index out of range");
    std::vector<Triplet> t;
    for (Eigen::Index s = 0; s < fs.dim(); ++s) {
        const int n = fs.occupation(s, i);
        if (n > 0) t.emplace_back(s - fs.stride(i), s, std::sqrt(double(n)));
    }
    return from_triplets(fs.dim(), t);
}

SparseMat number_operator(const FockSpace& fs) {
    std::vector<Triplet> t;
    for (Eigen::Index s = 0; s < fs.dim(); ++s) {
        const int n = fs.total(s);
        if (n > 0) t.emplace_back(s, s, double(n));
    }
    return from_triplets(fs.dim(), t);
}

SparseMat projected_product(const FockSpace& fs, const std::vector<LadderFactor>& factors) {
    for (const LadderFactor& f : factors) {
        if (f.mode < 0 || f.mode >= fs.modes()) throw InvalidArgument("projected_product: mode out of range");
    }
    std::vector<Triplet> t;
    std::vector<int> occ;
    for (Eigen::Index s = 0; s < fs.dim(); ++s) {
        occ = fs.occupations(s);
        double amp = 1.0;
        // The rightmost factor acts first.
        for (auto it = factors.rbegin(); it != factors.rend() && amp != 0.0; ++it) {
            int& n = occ[std::size_t(it->mode)];
            if (it->creation) {
                ++n;
                amp *= std::sqrt(double(n));
            } else {
                amp *= std::sqrt(double(n));
                if (n > 0) --n;
            }
        }
        if (amp == 0.0) continue;
        bool inside = true;
        for (int n : occ) inside = inside && n <= fs.n_max();
        if (inside) t.emplace_back(fs.index(occ), s, amp);
    }
    return from_triplets(fs.dim(), t);
}

SparseMat build_quadratic_hamiltonian(const Eigen::MatrixXcd& K, const Eigen::MatrixXcd& G, const FockSpace& fs) {
    const int M = fs.modes();
    if (K.rows() != M || G.rows() != M) throw InvalidArgument("build_quadratic_hamiltonian: kernel size != mode count");
    std::vector<SparseMat> a, ad;
    for (int i = 0; i < M; ++i) {
        a.push_back(ladder(fs, i));
        ad.push_back(SparseMat(a.back().adjoint()));
    }
    SparseMat H = number_operator(fs);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            if (G(i, j) != 0.0) H -= G(i, j) * SparseMat(ad[std::size_t(i)] * a[std::size_t(j)]);
            if (K(i, j) != 0.0) {
                H -= (0.5 * K(i, j)) * SparseMat(ad[std::size_t(i)] * ad[std::size_t(j)]);
                H -= (0.5 * std::conj(K(i, j))) * SparseMat(a[std::size_t(i)] * a[std::size_t(j)]);
            }
        }
    }
    H.prune(cd(0.0));
    H.makeCompressed();
    const double defect = hermiticity_defect(H);
    if (defect > 1e-10) throw InvariantError("build_quadratic_hamiltonian: Hermiticity defect " + std::to_string(defect));
    return H;
}

SparseMat build_quadratic_hamiltonian(const KernelPair& kp, const FockSpace& fs) {
    return build_quadratic_hamiltonian(kp.K, kp.G, fs);
}

SparseMat build_quadratic_from_table(const KernelPair& kp, const FockSpace& fs) {
    const int M = fs.modes();
    if (kp.modes.size() != M) throw InvalidArgument("build_quadratic_from_table: kernel size != mode count");
    SparseMat A(fs.dim(), fs.dim());
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            A += kp.raw_pp(i, j) * projected_product(fs, {{i, true}, {j, true}});
            A += kp.raw_pm(i, j) * projected_product(fs, {{i, true}, {j, false}});
            A += kp.raw_mp(i, j) * projected_product(fs, {{i, false}, {j, true}});
            A += kp.raw_mm(i, j) * projected_product(fs, {{i, false}, {j, false}});
        }
    }
    SparseMat I(fs.dim(), fs.dim());
    I.setIdentity();
    SparseMat H = number_operator(fs) - A + kp.epsilon * I;
    H.makeCompressed();
    return H;
}

double hermiticity_defect(const SparseMat& H) {
    const SparseMat D = H - SparseMat(H.adjoint());
    double m = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
        for (SparseMat::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

QuasiFreeState reduced_densities(const Eigen::VectorXcd& psi, const FockSpace& fs) {
    const int M = fs.modes();
    if (psi.size() != fs.dim()) throw InvalidArgument("reduced_densities: state size mismatch");
    std::vector<Eigen::VectorXcd> a_psi, ad_psi;
    for (int i = 0; i < M; ++i) {
        const SparseMat a = ladder(fs, i);
        a_psi.push_back(a * psi);
        ad_psi.push_back(a.adjoint() * psi);
    }
    QuasiFreeState s = vacuum_state(M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            s.gamma(i, j) = a_psi[std::size_t(j)].dot(a_psi[std::size_t(i)]);     // <a_j psi, a_i psi>
            s.pairing(i, j) = ad_psi[std::size_t(j)].dot(a_psi[std::size_t(i)]);  // <a_j^+ psi, a_i psi>
        }
    }
    return s;
}

double top_level_population(const Eigen::VectorXcd& psi, const FockSpace& fs) {
    double p = 0.0;
    for (Eigen::Index s = 0; s < fs.dim(); ++s) {
        for (int i = 0; i < fs.modes(); ++i) {
            if (fs.occupation(s, i) == fs.n_max()) {
                p += std::norm(psi[s]);
                break;
            }
        }
    }
    return p;
}

double number_expectation(const Eigen::VectorXcd& psi, const FockSpace& fs) {
    double n = 0.0;
    for (Eigen::Index s = 0; s < fs.dim(); ++s) n += fs.total(s) * std::norm(psi[s]);
    return n;
}

Eigen::VectorXcd fock_vacuum(const FockSpace& fs) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(fs.dim());
    v[0] = 1.0;
    return v;
}

}  // namespace polaron
